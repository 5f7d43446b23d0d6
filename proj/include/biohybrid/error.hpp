#pragma once

#include <stdexcept>
#include <string>

namespace biohybrid {

enum class Errc {
    WrongLength,
    OutOfRange,
    DuplicateSynapseId,
    SelfLoop,
    BadConfig,
    NodeStartupFailure,
    OutputIoError,
    InputIoError,
};

const char* to_string(Errc code);

// Thrown for configuration, I/O and contract violations. Per-packet problems
// on the receive path are not errors; nodes count and log them instead.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace biohybrid
