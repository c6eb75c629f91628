#pragma once

#include <stdexcept>
#include <string>

namespace qprog {

// Every library failure carries a stable machine-readable code next to the
// human-readable message; the CLI forwards both verbatim.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

inline Error dimension_error(const std::string& msg) { return Error("dimension_mismatch", msg); }
inline Error argument_error(const std::string& msg) { return Error("invalid_argument", msg); }
inline Error limit_error(const std::string& msg) { return Error("limit_exceeded", msg); }

}  // namespace qprog
