#pragma once

#include <stdexcept>
#include <string>

namespace intermit {

// Error taxonomy mirrored by the CLI exit codes: config 2, numerical 3, io 4.

struct config_error : std::invalid_argument {
    explicit config_error(const std::string& what) : std::invalid_argument(what) {}
};

struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

struct io_error : std::runtime_error {
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace intermit
