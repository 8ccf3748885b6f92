#pragma once

#include <stdexcept>
#include <string>

namespace ucpd {

// Shape or layering violations (wrong tensor shape, cross-layer tuple, ...).
struct StructuralError : std::runtime_error {
    explicit StructuralError(const std::string& what) : std::runtime_error(what) {}
};

// Out-of-range scalar parameters (lambda outside [0,1], zeta outside (0,1), ...).
struct ParameterError : std::invalid_argument {
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// KL divergence undefined: theta > 0 where the reference measure is 0.
struct DivergenceUndefined : std::runtime_error {
    explicit DivergenceUndefined(const std::string& what) : std::runtime_error(what) {}
};

// Config file problems; message names the offending key or line.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Constrained problem has an empty feasible set.
struct InfeasibleError : std::runtime_error {
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ucpd
