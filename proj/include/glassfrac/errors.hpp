#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace glassfrac {

/// Invalid model input: bad parameters, inconsistent geometry, unreadable config.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
    ConfigError(const std::string& what, std::vector<std::string> violations)
        : std::runtime_error(what), violations_(std::move(violations)) {}

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Nonlinear or constrained solver failed to converge, or a system is singular.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// Point or entity lookup that lies outside the discretized domain.
class QueryError : public std::out_of_range {
public:
    explicit QueryError(const std::string& what) : std::out_of_range(what) {}
};

}  // namespace glassfrac
