#pragma once

#include <stdexcept>
#include <string>

namespace g2sf {

// Error taxonomy mirrored by the C API status codes and the CLI exit codes.
enum class ErrorKind {
    invalid_argument,  // bad inputs, mismatched shapes, malformed files
    io,                // unreadable/unwritable paths
    numeric,           // divergence, singular/indefinite metrics, failed checks with no recovery
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail_invalid(const std::string& msg) { throw Error(ErrorKind::invalid_argument, msg); }
[[noreturn]] inline void fail_io(const std::string& msg) { throw Error(ErrorKind::io, msg); }
[[noreturn]] inline void fail_numeric(const std::string& msg) { throw Error(ErrorKind::numeric, msg); }

inline void require(bool cond, ErrorKind kind, const std::string& msg) {
    if (!cond) throw Error(kind, msg);
}

}  // namespace g2sf
