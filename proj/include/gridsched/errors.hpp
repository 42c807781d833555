#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gridsched {

// Bad argument to a public operation (zero tasks, invalid distribution
// parameters, duplicate agent ids, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Schedule does not fit the workload it is evaluated against.
class InvalidSchedule : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Every resource is at capacity when a task has to be placed.
class CapacityExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PoolClosed : public std::runtime_error {
public:
    PoolClosed() : std::runtime_error("agent pool is shut down") {}
};

// Output could not be written (missing or unwritable directory, full disk).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Workload file parse failure. line() is 1-based; field() names the token
// that could not be accepted.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::string field, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ", field '" + field + "': " + what),
          line_(line),
          field_(std::move(field)) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::size_t line_;
    std::string field_;
};

} // namespace gridsched
