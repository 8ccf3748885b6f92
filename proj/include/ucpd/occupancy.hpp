#pragma once

#include <string>
#include <vector>

#include "ucpd/layout.hpp"

namespace ucpd {

struct ConstraintViolation {
    enum class Kind { layer_mass, negativity, flow };
    Kind kind;
    int layer;     // layer k for mass, layer of the state for flow/negativity
    int state;     // state index within its layer (flow/negativity), -1 otherwise
    double residual;
    std::string describe() const;
};

struct ValidationReport {
    bool ok = true;
    std::vector<ConstraintViolation> violations;
    double worst() const;
};

// residual threshold for the occupancy polytope conditions
inline constexpr double kPolytopeTol = 1e-9;

/// Checks condition (a) (per-layer unit mass, non-negativity) and condition
/// (b) (flow conservation at interior states). ok iff all residuals <= 1e-9.
ValidationReport validate_occupancy(const OccupancyMeasure& theta, const MdpLayout& layout);

/// pi(a|s) = sum_{s'} theta(s,a,s') / sum_{a,s'} theta(s,a,s').
/// A state with no mass gets a uniform action row; such states are never
/// reached, so the choice does not affect behaviour.
Policy recover_policy(const OccupancyMeasure& theta);

/// (1-lambda) * theta + lambda * uniform, blockwise; keeps iterates strictly
/// interior so the exponential step stays well-defined.
OccupancyMeasure mix_with_uniform(const OccupancyMeasure& theta, double lambda);

/// Unnormalized KL divergence sum[theta log(theta/ref) - theta + ref],
/// with 0 log 0 := 0. Throws DivergenceUndefined if theta > 0 where ref = 0.
double unnormalized_kl(const LayeredTensor& theta, const LayeredTensor& theta_ref);

/// <f, theta> over all (k,s,a,s') entries.
double inner_product(const StageFunction& func, const LayeredTensor& theta);

// per-(s,a) marginal m(s,a) = sum_{s'} theta(s,a,s'), flattened layer by layer
std::vector<double> pair_marginals(const OccupancyMeasure& theta);

}  // namespace ucpd
