#pragma once

#include <stdexcept>
#include <string>

namespace splatcolor {

// Bad file contents: wrong schema, missing properties, malformed records.
class SchemaError : public std::runtime_error {
public:
    explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

// Structurally valid input carrying invalid values (NaN fields, bad dimensions).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Caller broke an operation precondition.
class InvalidInputError : public std::invalid_argument {
public:
    explicit InvalidInputError(const std::string& what) : std::invalid_argument(what) {}
};

// Inconsistent run configuration (missing artifacts, contradictory flags).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Optimization produced non-finite values.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, int iteration, std::string view_id)
        : std::runtime_error(what), iteration(iteration), view_id(std::move(view_id)) {}
    int iteration = -1;
    std::string view_id;
};

}  // namespace splatcolor
