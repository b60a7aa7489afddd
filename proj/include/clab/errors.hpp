#pragma once

#include <stdexcept>
#include <string>

namespace clab {

/// Invalid grid, geometry, or scenario configuration.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A linear-solver failure (singular or ill-conditioned step matrix).
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, int step_index)
        : std::runtime_error(what + " (step " + std::to_string(step_index) + ")"),
          step(step_index) {}
    int step;
};

/// An operation was called with inputs that violate its contract.
class PreconditionError : public std::runtime_error {
public:
    explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

/// Coefficient reconstruction could not proceed (e.g. positivity floor violated).
class ReconstructionError : public std::runtime_error {
public:
    explicit ReconstructionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace clab
