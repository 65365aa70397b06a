#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sdf {

// Invalid configuration value. field() names the offending key.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& message)
        : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// Dataset content error. line() is 1-based, 0 when not tied to a line.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& message, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message : message),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Header/declaration problem: missing class column, unsupported attribute type.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller broke an operation precondition (unlabeled training instance, wrong arity).
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace sdf
