#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dttm {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid configuration value; the message names the offending field.
class ConfigError : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

// Malformed input document. `location` is a line number ("line 7") or a JSON
// path ("targets[2].entries[0].bbox") and is prefixed to the message.
class ParseError : public Error {
public:
    ParseError(std::string location, const std::string& what)
        : Error(location.empty() ? what : location + ": " + what), location_(std::move(location)) {}

    const std::string& location() const noexcept { return location_; }

private:
    std::string location_;
};

} // namespace dttm
