#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace rohan {

// Failure categories, each mapped to a stable process exit code.
enum class ErrorCategory { usage = 2, io = 3, format = 4, external = 5, internal = 10 };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, std::string message)
        : std::runtime_error(std::move(message)), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }
    int exit_code() const noexcept { return static_cast<int>(category_); }

private:
    ErrorCategory category_;
};

inline Error usage_error(std::string msg) { return Error(ErrorCategory::usage, std::move(msg)); }
inline Error io_error(std::string msg) { return Error(ErrorCategory::io, std::move(msg)); }
inline Error format_error(std::string msg) { return Error(ErrorCategory::format, std::move(msg)); }
inline Error external_error(std::string msg) { return Error(ErrorCategory::external, std::move(msg)); }
inline Error internal_error(std::string msg) { return Error(ErrorCategory::internal, std::move(msg)); }

}  // namespace rohan
