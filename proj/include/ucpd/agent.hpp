#pragma once

#include <optional>
#include <vector>

#include "ucpd/env.hpp"
#include "ucpd/layout.hpp"
#include "ucpd/learner.hpp"
#include "ucpd/orlp.hpp"

namespace ucpd {

/// Virtual queues: one non-negative scalar per constraint, in loss units.
struct DualVector {
    std::vector<double> q;

    double norm() const;
};

struct AgentConfig {
    double v_weight = 1.0;   // V
    double alpha = 1.0;      // proximal weight
    double lambda = 0.0;     // uniform-mixing coefficient, in [0,1)
    double zeta = 0.1;       // confidence failure probability
    int horizon = 1;         // T
    std::vector<double> thresholds;  // c_i
    SolverOptions solver;
    bool known_model = false;
    double known_model_epsilon = 1e-7;

    void validate() const;
};

/// V = L sqrt(T), alpha = L T, lambda = 1/T.
AgentConfig theorem_schedule(int layer_count, int horizon, double zeta,
                             std::vector<double> thresholds);

/// Mutable learner state across Algorithm-1 episodes.
struct AgentState {
    int t = 1;  // episode about to be played
    OccupancyMeasure theta_prev;   // theta^{t-1} (theta^t after begin_episode)
    DualVector duals;              // Q(t-1) before the episode's update
    Counters counters;
    ConfidenceSet cs;
    std::optional<StageFunction> f_prev;               // f^{t-1}
    std::optional<std::vector<StageFunction>> g_prev;  // g^{t-1}
    DualWarmStart warm;

    AgentState(const MdpLayout& layout, int constraint_count);
};

class UcpdAgent {
public:
    UcpdAgent(const MdpLayout& layout, AgentConfig config,
              const TransitionModel* true_model = nullptr);

    /// Solve the episode-t program and recover the policy to act with.
    std::pair<OccupancyMeasure, Policy> begin_episode();

    /// Updates the dual queues (coupling g^{t-1} with theta^t), ingests the
    /// sampled path and the revealed feedback, and rolls the epoch when some
    /// pair's local count reaches its global count.
    void end_episode(const Trajectory& trajectory, const StageFunction& f_t,
                     const std::vector<StageFunction>& g_t);

    const AgentState& state() const { return state_; }
    const AgentConfig& config() const { return config_; }
    const SolverReport& last_report() const { return last_report_; }
    int episode() const { return state_.t; }
    double dual_norm() const { return state_.duals.norm(); }

private:
    MdpLayout layout_;
    AgentConfig config_;
    AgentState state_;
    SolverReport last_report_;
};

/// Q_i <- max{Q_i + <g_i, theta> - c_i, 0}.
DualVector update_duals(const DualVector& q, const std::vector<StageFunction>& g_prev,
                        const OccupancyMeasure& theta_t, const std::vector<double>& thresholds);

}  // namespace ucpd
