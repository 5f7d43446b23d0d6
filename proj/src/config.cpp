#include "biohybrid/config.hpp"

#include "biohybrid/error.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace biohybrid {

namespace pt = boost::property_tree;

Config Config::parse_ini(const std::string& text) {
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw Error(Errc::BadConfig, e.what());
    }
    Config cfg;
    // The INI reader drops sections without keys; record headers separately.
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);) {
        const auto open = line.find_first_not_of(" \t");
        if (open == std::string::npos || line[open] != '[') continue;
        const auto close = line.find(']', open);
        if (close != std::string::npos) cfg.sections_.push_back(line.substr(open + 1, close - open - 1));
    }
    for (const auto& [section, node] : tree) {
        if (node.empty()) {
            cfg.values_[section] = node.data();
            continue;
        }
        for (const auto& [key, value] : node) cfg.values_[section + "." + key] = value.data();
    }
    return cfg;
}

Config Config::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::InputIoError, "cannot open config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    Config cfg = parse_ini(buf.str());
    cfg.base_dir = path.parent_path();
    return cfg;
}

std::optional<std::string> Config::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    return get(key).value_or(fallback);
}

double Config::get_double(const std::string& key, double fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    try {
        std::size_t used = 0;
        const double d = std::stod(*v, &used);
        if (used != v->size()) throw std::invalid_argument(*v);
        return d;
    } catch (const std::exception&) {
        throw Error(Errc::BadConfig, key + ": expected a number, got '" + *v + "'");
    }
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    try {
        std::size_t used = 0;
        const auto i = std::stoll(*v, &used);
        if (used != v->size()) throw std::invalid_argument(*v);
        return i;
    } catch (const std::exception&) {
        throw Error(Errc::BadConfig, key + ": expected an integer, got '" + *v + "'");
    }
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    std::string s = *v;
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "true" || s == "1" || s == "on" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "off" || s == "no") return false;
    throw Error(Errc::BadConfig, key + ": expected a boolean, got '" + *v + "'");
}

std::map<std::string, std::string> Config::with_prefix(const std::string& prefix) const {
    std::map<std::string, std::string> out;
    const std::string p = prefix + ".";
    for (auto it = values_.lower_bound(p); it != values_.end() && it->first.rfind(p, 0) == 0; ++it) {
        out[it->first.substr(p.size())] = it->second;
    }
    return out;
}

}  // namespace biohybrid
