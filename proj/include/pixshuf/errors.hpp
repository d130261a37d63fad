#pragma once

#include <stdexcept>
#include <string>

namespace pixshuf {

// File missing, unreadable, or unwritable.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bytes that cannot be decoded as a supported raster format.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// Mismatched or out-of-contract shapes/sizes.
class DimensionError : public std::invalid_argument {
public:
    explicit DimensionError(const std::string& msg) : std::invalid_argument(msg) {}
};

// NaN/Inf encountered during optimization; carries the iteration it happened at.
class NonFiniteError : public std::runtime_error {
public:
    NonFiniteError(const std::string& msg, long iteration)
        : std::runtime_error(msg + " (iteration " + std::to_string(iteration) + ")"),
          iteration_(iteration) {}
    long iteration() const { return iteration_; }

private:
    long iteration_;
};

} // namespace pixshuf
