#pragma once

#include <stdexcept>
#include <string>

namespace commonlearn {

/// Malformed or semantically invalid input. `where` is a JSON pointer or a
/// short location description, empty when unknown.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string where, const std::string& message)
        : std::runtime_error(where.empty() ? message : where + ": " + message),
          where_(std::move(where)) {}

    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

/// A requested computation exceeds the configured exact-engine budget.
class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An internal consistency check failed.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Count data with positive mass on a signal that has probability zero under
/// every state. Such data cannot be produced by sampling.
class InfeasibleCounts : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace commonlearn
