#pragma once

#include <stdexcept>
#include <string>

namespace rrat {

// Exit-code contract shared with the CLI: 1 validation failure,
// 2 input/usage error, 3 unsupported computation.
class Error : public std::runtime_error {
public:
    Error(std::string msg, int exit_code)
        : std::runtime_error(std::move(msg)), exit_code_(exit_code) {}
    int exit_code() const noexcept { return exit_code_; }

private:
    int exit_code_;
};

class InputError : public Error {
public:
    explicit InputError(std::string msg) : Error(std::move(msg), 2) {}
};

class ValidationError : public Error {
public:
    explicit ValidationError(std::string msg) : Error(std::move(msg), 1) {}
};

class UnsupportedError : public Error {
public:
    explicit UnsupportedError(std::string msg) : Error(std::move(msg), 3) {}
};

}  // namespace rrat
