#pragma once

#include <stdexcept>
#include <string>

namespace quadfold {

/// Raised when an operation's precondition on its operands does not hold
/// (Hermiticity, normalization).
class ContractViolation : public std::logic_error {
public:
    explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

/// Integration produced a state whose norm drifted beyond the hard limit.
class NumericalFailure : public std::runtime_error {
public:
    explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Bad scenario/CLI configuration: unknown preset, unknown key, bad label.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace quadfold
