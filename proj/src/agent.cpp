#include "ucpd/agent.hpp"

#include <cmath>

namespace ucpd {

double DualVector::norm() const {
    double sq = 0.0;
    for (double v : q) sq += v * v;
    return std::sqrt(sq);
}

void AgentConfig::validate() const {
    if (v_weight <= 0.0) throw ParameterError("agent config: V must be positive");
    if (alpha <= 0.0) throw ParameterError("agent config: alpha must be positive");
    if (lambda < 0.0 || lambda >= 1.0) throw ParameterError("agent config: lambda not in [0,1)");
    if (zeta <= 0.0 || zeta >= 1.0) throw ParameterError("agent config: zeta not in (0,1)");
    if (horizon < 1) throw ParameterError("agent config: horizon must be >= 1");
}

AgentConfig theorem_schedule(int layer_count, int horizon, double zeta,
                             std::vector<double> thresholds) {
    AgentConfig cfg;
    const double L = layer_count;
    const double T = horizon;
    cfg.v_weight = L * std::sqrt(T);
    cfg.alpha = L * T;
    // lambda = 1/T; a one-episode run never mixes, so keep it inside [0,1)
    cfg.lambda = horizon > 1 ? 1.0 / T : 0.0;
    cfg.zeta = zeta;
    cfg.horizon = horizon;
    cfg.thresholds = std::move(thresholds);
    return cfg;
}

AgentState::AgentState(const MdpLayout& layout, int constraint_count)
    : theta_prev(uniform_occupancy(layout)), counters(layout) {
    duals.q.assign(constraint_count, 0.0);
}

UcpdAgent::UcpdAgent(const MdpLayout& layout, AgentConfig config,
                     const TransitionModel* true_model)
    : layout_(layout),
      config_(std::move(config)),
      state_(layout, static_cast<int>(config_.thresholds.size())) {
    config_.validate();
    if (config_.known_model) {
        if (!true_model)
            throw ParameterError("agent: known-model mode needs the true transition model");
        state_.cs = known_model_confidence_set(*true_model, layout_, config_.horizon,
                                               config_.zeta, config_.known_model_epsilon);
    } else {
        state_.cs = initial_confidence_set(layout_, config_.horizon, config_.zeta);
    }
}

std::pair<OccupancyMeasure, Policy> UcpdAgent::begin_episode() {
    OccupancyMeasure theta = uniform_occupancy(layout_);
    if (state_.t == 1) {
        last_report_ = SolverReport{};
    } else {
        auto [solved, report] = solve_orlp(
            state_.t, state_.theta_prev, state_.duals.q, *state_.f_prev, *state_.g_prev,
            config_.v_weight, config_.alpha, config_.lambda, state_.cs, layout_, config_.solver,
            &state_.warm);
        theta = std::move(solved);
        last_report_ = report;
    }
    Policy policy = recover_policy(theta);
    state_.theta_prev = theta;  // becomes theta^t for the dual update and next solve
    return {std::move(theta), std::move(policy)};
}

DualVector update_duals(const DualVector& q, const std::vector<StageFunction>& g_prev,
                        const OccupancyMeasure& theta_t, const std::vector<double>& thresholds) {
    if (q.q.size() != g_prev.size() || q.q.size() != thresholds.size())
        throw StructuralError("update_duals: constraint count mismatch");
    DualVector out = q;
    for (std::size_t i = 0; i < q.q.size(); ++i) {
        const double slack = inner_product(g_prev[i], theta_t) - thresholds[i];
        out.q[i] = std::max(q.q[i] + slack, 0.0);
    }
    return out;
}

void UcpdAgent::end_episode(const Trajectory& trajectory, const StageFunction& f_t,
                            const std::vector<StageFunction>& g_t) {
    if (static_cast<int>(trajectory.steps.size()) != layout_.layer_count())
        throw StructuralError("end_episode: trajectory must have exactly L transitions");
    if (static_cast<int>(g_t.size()) != static_cast<int>(config_.thresholds.size()))
        throw StructuralError("end_episode: wrong number of constraint functions");

    // Q(t) couples the previous episode's constraints with the current theta;
    // episode 1 has no g^0, so Q(1) stays at the zero initialization
    if (state_.t >= 2)
        state_.duals = update_duals(state_.duals, *state_.g_prev, state_.theta_prev,
                                    config_.thresholds);

    for (const auto& step : trajectory.steps)
        record_transition(state_.counters, layout_, step.state, step.action, step.next_state);

    if (!config_.known_model && epoch_trigger(state_.counters))
        state_.cs = advance_epoch(state_.counters, layout_, config_.horizon, config_.zeta);
    else if (config_.known_model && epoch_trigger(state_.counters)) {
        // counters still roll so the epoch column stays meaningful
        advance_epoch(state_.counters, layout_, config_.horizon, config_.zeta);
        state_.cs.epoch_index = state_.counters.epoch_index;
    }

    state_.f_prev = f_t;
    state_.g_prev = g_t;
    state_.t += 1;
}

}  // namespace ucpd
