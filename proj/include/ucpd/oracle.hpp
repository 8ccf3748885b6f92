#pragma once

#include <optional>
#include <vector>

#include "ucpd/env.hpp"
#include "ucpd/layout.hpp"
#include "ucpd/occupancy.hpp"

namespace ucpd {

/// Offline benchmark: minimize <F, theta> over the true occupancy polytope
/// (conditions (a),(b),(c) for the true kernel) subject to <g_i, theta> <= c_i.
struct HindsightProblem {
    MdpLayout layout;
    TransitionModel model;
    StageFunction summed_losses;          // F = sum_t f^t
    std::vector<StageFunction> expected_constraints;  // declared means g_i
    std::vector<double> thresholds;       // c_i

    HindsightProblem(MdpLayout l) : layout(std::move(l)) {}
};

struct OracleSolution {
    OccupancyMeasure theta;
    double value = 0.0;
    double duality_gap = 0.0;
    double constraint_residual = 0.0;  // worst violation of the LP rows
};

/// Solves the benchmark as a dense LP (simplex, Bland's rule). Condition (c)
/// enters as the linear equalities theta(s,a,s') = P(s'|s,a) sum_{s''} theta.
/// Throws InfeasibleError with a certificate message when no theta qualifies.
OracleSolution solve_best_fixed(const HindsightProblem& problem);

/// Testing oracle: enumerates all deterministic policies (guarded at 12) and
/// all pairwise mixtures on a weight grid; returns the best feasible point,
/// or nullopt when none of the grid points is feasible.
std::optional<OracleSolution> brute_force_best_fixed(const HindsightProblem& problem,
                                                     double grid_resolution);

/// True iff some theta in the polytope satisfies <g_i, theta> <= c_i - slack.
bool feasible_with_slack(const HindsightProblem& problem, double slack);

// range of <g, theta> over the unconstrained polytope, for threshold placement
std::pair<double, double> constraint_value_range(const MdpLayout& layout,
                                                 const TransitionModel& model,
                                                 const StageFunction& g);

/// Per-episode bookkeeping behind the Regret/Violation metrics.
struct MetricsAccumulator {
    double cum_alg_loss = 0.0;                 // sum_t <f^t, theta_bar^t>
    std::vector<double> episode_losses;        // <f^t, theta_bar^t> history
    StageFunction loss_sum;                    // sum_t f^t
    std::vector<double> constraint_sums;       // sum_t (<g_i^t, theta_bar^t> - c_i)

    MetricsAccumulator(const MdpLayout& layout, int constraint_count)
        : loss_sum(layout), constraint_sums(constraint_count, 0.0) {}

    void observe(const StageFunction& f_t, const std::vector<StageFunction>& g_t,
                 const OccupancyMeasure& theta_bar, const std::vector<double>& thresholds);
};

/// Regret(T) = sum_t <f^t, theta_bar^t> - <sum_t f^t, theta_star>.
double regret(const MetricsAccumulator& acc, const OccupancyMeasure& theta_star);

/// Violation(T) = || [ sum_t (g^t(theta_bar^t) - c) ]_+ ||_2.
double violation(const MetricsAccumulator& acc);

}  // namespace ucpd
