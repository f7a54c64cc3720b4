#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace modsynth {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidStructure : public Error {
public:
    using Error::Error;
};

class ConnectorMismatch : public Error {
public:
    explicit ConnectorMismatch(std::size_t junction)
        : Error("connector mismatch at junction " + std::to_string(junction)), junction_(junction)
    {
    }
    std::size_t junction() const noexcept { return junction_; }

private:
    std::size_t junction_;
};

class DimensionMismatch : public Error {
public:
    DimensionMismatch(std::size_t expected, std::size_t got)
        : Error("dimension mismatch: expected " + std::to_string(expected) + ", got " + std::to_string(got))
    {
    }
};

class InvalidEndpoint : public Error {
public:
    using Error::Error;
};

class EmptyPath : public Error {
public:
    EmptyPath() : Error("path has no waypoints") {}
};

class Unsatisfiable : public Error {
public:
    using Error::Error;
};

class InitFailure : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace modsynth
