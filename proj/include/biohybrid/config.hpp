#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace biohybrid {

// Flat "section.key" -> value view of an INI file.
class Config {
public:
    Config() = default;

    static Config parse_ini(const std::string& text);
    static Config load(const std::filesystem::path& path);

    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::map<std::string, std::string>& values() const { return values_; }
    // Every [section] header in the file, including empty ones.
    const std::vector<std::string>& sections() const { return sections_; }

    std::optional<std::string> get(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    // Keys under "prefix." with the prefix stripped.
    std::map<std::string, std::string> with_prefix(const std::string& prefix) const;

    // Directory relative paths in the file are resolved against.
    std::filesystem::path base_dir;

private:
    std::map<std::string, std::string> values_;
    std::vector<std::string> sections_;
};

}  // namespace biohybrid
