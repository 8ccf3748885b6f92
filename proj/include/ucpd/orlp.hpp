#pragma once

#include <optional>
#include <vector>

#include "ucpd/layout.hpp"
#include "ucpd/learner.hpp"
#include "ucpd/occupancy.hpp"

namespace ucpd {

/// psi = V f^{t-1} + sum_i Q_i(t-1) g_i^{t-1}, the linearized Lagrangian.
struct PenaltyVector {
    StageFunction psi;
};

/// Multipliers of the projection dual: mu_plus/mu_minus per (s,a,s') edge
/// (entrywise >= 0), beta per state. beta at the initial and terminal states
/// is a gauge: the objective depends on it only linearly, so the solver pins
/// both to zero and only the interior entries move.
struct DualPoint {
    LayeredTensor mu_plus;
    LayeredTensor mu_minus;
    std::vector<double> beta;  // indexed by global state id

    DualPoint() = default;
    DualPoint(const MdpLayout& layout)
        : mu_plus(layout), mu_minus(layout), beta(layout.total_states(), 0.0) {}
};

struct SolverReport {
    int iterations = 0;
    double grad_norm = 0.0;             // final projected-gradient sup-norm
    double feasibility_residual = 0.0;  // worst of mass/flow/membership residuals
    double objective_value = 0.0;       // <psi,theta> + alpha D(theta, theta_mixed)
    double dual_value = 0.0;            // sum_k log Z_k at the returned multipliers
    bool warm_started = false;
    int objective_decrease_violations = 0;
    int backtracks = 0;
};

struct SolverFailure : std::runtime_error {
    SolverReport report;
    SolverFailure(const std::string& what, SolverReport r)
        : std::runtime_error(what), report(std::move(r)) {}
};

struct SolverOptions {
    double grad_tol = 1e-8;       // projected-gradient sup-norm target
    double flow_tol = 1e-9;       // condition (b) residual gate on the output
    double member_tol = 1e-6;     // membership residual gate on the output
    int max_iterations = 5000;
};

/// Multipliers carried across episodes to seed the next projection.
struct DualWarmStart {
    LayeredTensor deviation;      // mu_minus - mu_plus per edge
    std::vector<double> row_bound;  // mu_plus + mu_minus, constant per (s,a) row
    std::vector<double> beta;
};

/// psi = V*f + sum_i q_i * g_i, elementwise.
PenaltyVector build_penalty(double v_weight, const StageFunction& f_prev,
                            const std::vector<double>& q,
                            const std::vector<StageFunction>& g_prev);

/// Closed-form unconstrained step: theta_mixed(s,a,s') * exp(-psi/alpha).
LayeredTensor exponential_step(const OccupancyMeasure& theta_mixed, const PenaltyVector& psi,
                               double alpha);

/// Log-partition dual of the projection. Returns sum_k log Z_k and its
/// gradient with respect to (mu_plus, mu_minus, beta), where
///   B(s,a,s') = mu_minus - mu_plus + (mu_plus + mu_minus) eps(s,a)
///             + beta(s') - beta(s) - psi(s,a,s')/alpha
///             - sum_{s''} p_hat(s''|s,a) (mu_minus - mu_plus)(s,a,s'')
///   Z_k = sum_{(s,a,s') in layer k} theta_mixed e^{B}.
/// theta_mixed must be strictly positive.
std::pair<double, DualPoint> dual_objective(const DualPoint& dual,
                                            const OccupancyMeasure& theta_mixed,
                                            const PenaltyVector& psi, double alpha,
                                            const ConfidenceSet& cs);

/// KL projection of theta_unnorm onto the optimistic polytope (conditions
/// (a),(b) plus the per-pair L1 confidence balls), via projected gradient on
/// the dual with Armijo backtracking. Throws SolverFailure when the iteration
/// cap is reached before the residual gates are met.
std::pair<OccupancyMeasure, SolverReport> kl_projection(
    const LayeredTensor& theta_unnorm, const OccupancyMeasure& theta_mixed,
    const PenaltyVector& psi, double alpha, const ConfidenceSet& cs,
    const SolverOptions& options = {}, DualWarmStart* warm = nullptr,
    DualPoint* dual_out = nullptr);

/// One episode's occupancy update: mix, penalize, exponential step, project.
/// For t = 1 returns the uniform initialization.
std::pair<OccupancyMeasure, SolverReport> solve_orlp(
    int t, const OccupancyMeasure& theta_prev, const std::vector<double>& q,
    const StageFunction& f_prev, const std::vector<StageFunction>& g_prev, double v_weight,
    double alpha, double lambda, const ConfidenceSet& cs, const MdpLayout& layout,
    const SolverOptions& options = {}, DualWarmStart* warm = nullptr);

/// Euclidean projection of (d, rho) onto {(d, rho): |d_e| <= rho}.
/// Exposed for unit tests.
void project_linf_cone(std::vector<double>& d, double& rho);

}  // namespace ucpd
