#pragma once

#include <stdexcept>
#include <string>

namespace leafscope {

enum class ErrorCode {
    Io,
    Format,
    InvalidArgument,
    Degenerate,
    Dimension,
    NotFound,
    Internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace leafscope
