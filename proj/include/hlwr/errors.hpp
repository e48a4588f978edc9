#pragma once

#include <stdexcept>
#include <string>

namespace hlwr {

/// Argument outside the domain of a curve law or conversion.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A wave whose kind-specific preconditions do not hold.
class InadmissibleWave : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Riemann data outside the solvable range.
class NoSolution : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Root bracket without a sign change.
class NoRoot : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: unknown names, malformed files, overrides outside a schema.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace hlwr
