#pragma once

#include <stdexcept>
#include <string>

namespace wocc {

// Failure categories map one-to-one onto CLI exit codes.
enum class ErrorKind { Usage = 1, Validation = 2, Numerical = 3 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

inline Error usage_error(const std::string& what) { return {ErrorKind::Usage, what}; }
inline Error validation_error(const std::string& what) { return {ErrorKind::Validation, what}; }
inline Error numerical_error(const std::string& what) { return {ErrorKind::Numerical, what}; }

} // namespace wocc
