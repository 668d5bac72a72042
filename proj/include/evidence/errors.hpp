#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace evidence {

/// Argument outside an operation's stated domain (non-finite z, w outside (0,1), ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A combination of inputs the artifact deliberately refuses to evaluate
/// (e.g. a p-value whose supremum is degenerate). Distinct from DomainError:
/// the inputs are well formed, the configuration is out of scope.
class UnsupportedConfiguration : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical procedure failed its own accuracy check (quadrature
/// order-doubling disagreement, undefined conditional probability, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Carries every validation issue found in a configuration document,
/// not just the first.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> issues)
        : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

    const std::vector<std::string>& issues() const { return issues_; }

private:
    static std::string join(const std::vector<std::string>& issues) {
        std::string out = "invalid configuration:";
        for (const auto& s : issues) {
            out += "\n  - ";
            out += s;
        }
        return out;
    }

    std::vector<std::string> issues_;
};

} // namespace evidence
