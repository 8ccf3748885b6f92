#include "ucpd/env.hpp"

#include <cmath>

#include "ucpd/oracle.hpp"

namespace ucpd {

std::pair<MdpLayout, TransitionModel> make_random_mdp(const std::vector<int>& layer_sizes,
                                                      int action_count, std::uint64_t seed) {
    MdpLayout layout(layer_sizes, action_count);
    TransitionModel model(layout);
    Rng rng = derive_stream(seed, "mdp-kernel");
    for (int k = 0; k < layout.layer_count(); ++k) {
        const int nn = layout.layer_size(k + 1);
        for (int i = 0; i < layout.layer_size(k); ++i) {
            for (int a = 0; a < action_count; ++a) {
                const auto row = rng.simplex(nn);
                for (int j = 0; j < nn; ++j) model.kernel.at(k, i, a, j) = row[j];
            }
        }
    }
    return {std::move(layout), std::move(model)};
}

LossSchedule make_loss_schedule(const MdpLayout& layout, const std::string& kind,
                                std::uint64_t seed, int period) {
    LossSchedule schedule;
    schedule.seed = seed;
    schedule.period = std::max(1, period);
    schedule.base = StageFunction(layout);
    schedule.flip_mask = LayeredTensor(layout);
    schedule.phase = LayeredTensor(layout);
    Rng rng = derive_stream(seed, "loss-base");
    for (int k = 0; k < layout.layer_count(); ++k) {
        auto base = schedule.base.block(k);
        auto mask = schedule.flip_mask.block(k);
        auto phase = schedule.phase.block(k);
        for (std::size_t e = 0; e < base.size(); ++e) {
            base[e] = 2.0 * rng.uniform() - 1.0;
            mask[e] = rng.uniform() < 0.5 ? 1.0 : 0.0;
            phase[e] = 2.0 * M_PI * rng.uniform();
        }
    }
    if (kind == "constant")
        schedule.kind = LossKind::constant;
    else if (kind == "switching")
        schedule.kind = LossKind::switching;
    else if (kind == "sinusoid")
        schedule.kind = LossKind::sinusoid;
    else if (kind == "arbitrary")
        schedule.kind = LossKind::arbitrary;
    else
        throw ParameterError("unknown loss kind '" + kind + "'");
    return schedule;
}

StageFunction loss_at(const LossSchedule& schedule, int t, int horizon) {
    if (t < 1 || t > horizon) throw ParameterError("loss_at: episode index out of range");
    StageFunction f = schedule.base;
    switch (schedule.kind) {
        case LossKind::constant:
            break;
        case LossKind::switching: {
            const double sign = ((t - 1) / schedule.period) % 2 == 0 ? 1.0 : -1.0;
            if (sign < 0.0) {
                for (int k = 0; k < f.layer_count(); ++k) {
                    auto b = f.block(k);
                    auto m = schedule.flip_mask.block(k);
                    for (std::size_t e = 0; e < b.size(); ++e)
                        if (m[e] > 0.5) b[e] = -b[e];
                }
            }
            break;
        }
        case LossKind::sinusoid: {
            const double omega = 2.0 * M_PI / schedule.period;
            for (int k = 0; k < f.layer_count(); ++k) {
                auto b = f.block(k);
                auto ph = schedule.phase.block(k);
                for (std::size_t e = 0; e < b.size(); ++e)
                    b[e] = b[e] * std::sin(omega * t + ph[e]);
            }
            break;
        }
        case LossKind::arbitrary: {
            std::uint64_t index = 0;
            for (int k = 0; k < f.layer_count(); ++k)
                for (auto& v : f.block(k))
                    v = hash_to_signed_unit(schedule.seed, static_cast<std::uint64_t>(t), index++);
            break;
        }
    }
    // sup-norm clamp; base construction already keeps |f| <= 1 but the clamp
    // is the contract
    for (int k = 0; k < f.layer_count(); ++k)
        for (auto& v : f.block(k)) v = std::clamp(v, -1.0, 1.0);
    return f;
}

ConstraintFamily make_constraint_family(const MdpLayout& layout, int count, std::uint64_t seed,
                                        double sup_budget, double noise_budget) {
    if (count < 0) throw ParameterError("constraint count must be non-negative");
    ConstraintFamily family;
    if (count == 0) return family;
    if (sup_budget + noise_budget > 1.0 + 1e-12)
        throw ParameterError("constraint family: sup and noise budgets exceed the unit bound");
    Rng rng = derive_stream(seed, "constraint-means");
    const double per_sup = sup_budget / count;
    const double per_noise = noise_budget / count;
    for (int i = 0; i < count; ++i) {
        StageFunction mean(layout);
        double max_abs = 0.0;
        for (int k = 0; k < layout.layer_count(); ++k)
            for (auto& v : mean.block(k)) {
                v = rng.uniform();
                max_abs = std::max(max_abs, v);
            }
        // scale so sup|g_i| equals its share of the budget
        if (max_abs > 0.0)
            for (int k = 0; k < layout.layer_count(); ++k)
                for (auto& v : mean.block(k)) v *= per_sup / max_abs;
        family.means.push_back(std::move(mean));
        family.noise.push_back(per_noise);
    }
    return family;
}

std::vector<StageFunction> constraints_at(const ConstraintFamily& family, Rng& rng) {
    std::vector<StageFunction> draws;
    draws.reserve(family.means.size());
    for (std::size_t i = 0; i < family.means.size(); ++i) {
        StageFunction g = family.means[i];
        const double amp = family.noise[i];
        if (amp > 0.0) {
            for (int k = 0; k < g.layer_count(); ++k)
                for (auto& v : g.block(k)) v += amp * rng.rademacher();
        }
        draws.push_back(std::move(g));
    }
    return draws;
}

Trajectory sample_episode(const TransitionModel& model, const Policy& policy,
                          const MdpLayout& layout, Rng& rng) {
    Trajectory trajectory;
    trajectory.steps.reserve(layout.layer_count());
    int state_index = 0;
    for (int k = 0; k < layout.layer_count(); ++k) {
        const int A = layout.action_count();
        double u = rng.uniform();
        int action = A - 1;
        double acc = 0.0;
        for (int a = 0; a < A; ++a) {
            acc += policy.prob(k, state_index, a);
            if (u < acc) {
                action = a;
                break;
            }
        }
        const int nn = layout.layer_size(k + 1);
        u = rng.uniform();
        int next_index = nn - 1;
        acc = 0.0;
        for (int j = 0; j < nn; ++j) {
            acc += model.prob(k, state_index, action, j);
            if (u < acc) {
                next_index = j;
                break;
            }
        }
        trajectory.steps.push_back({layout.state_id(k, state_index), action,
                                    layout.state_id(k + 1, next_index)});
        state_index = next_index;
    }
    return trajectory;
}

OccupancyMeasure true_occupancy(const Policy& policy, const TransitionModel& model,
                                const MdpLayout& layout) {
    OccupancyMeasure theta(layout);
    std::vector<double> dist{1.0};  // d over the current layer, starting at s0
    for (int k = 0; k < layout.layer_count(); ++k) {
        const int nn = layout.layer_size(k + 1);
        std::vector<double> next(nn, 0.0);
        for (int i = 0; i < layout.layer_size(k); ++i) {
            for (int a = 0; a < layout.action_count(); ++a) {
                const double pa = dist[i] * policy.prob(k, i, a);
                if (pa == 0.0) continue;
                for (int j = 0; j < nn; ++j) {
                    const double mass = pa * model.prob(k, i, a, j);
                    theta.at(k, i, a, j) = mass;
                    next[j] += mass;
                }
            }
        }
        dist = std::move(next);
    }
    return theta;
}

double trajectory_loss(const StageFunction& f, const Trajectory& trajectory,
                       const MdpLayout& layout) {
    double total = 0.0;
    for (const auto& step : trajectory.steps) {
        const int k = layout.layer_of(step.state);
        total += f.at(k, layout.index_in_layer(step.state), step.action,
                      layout.index_in_layer(step.next_state));
    }
    return total;
}

Scenario build_scenario(const ScenarioSpec& spec, int horizon) {
    auto [layout, model] = make_random_mdp(spec.layer_sizes, spec.actions, spec.mdp_seed);
    Scenario scenario(layout);
    scenario.model = std::move(model);

    int period = spec.loss_period;
    if (period <= 0) period = std::max(1, static_cast<int>(std::floor(std::sqrt(horizon))));
    scenario.losses = make_loss_schedule(scenario.layout, spec.loss_kind, spec.loss_seed, period);
    scenario.constraints = make_constraint_family(scenario.layout, spec.cons_count,
                                                  spec.cons_seed, spec.cons_sup, spec.cons_noise);

    const int I = scenario.constraints.count();
    if (!spec.thresholds.empty()) {
        if (static_cast<int>(spec.thresholds.size()) != I)
            throw ParameterError("scenario: thresholds count differs from constraint count");
        scenario.thresholds = spec.thresholds;
    } else {
        for (int i = 0; i < I; ++i) {
            const auto [lo, hi] = constraint_value_range(scenario.layout, scenario.model,
                                                         scenario.constraints.means[i]);
            scenario.thresholds.push_back(lo + spec.cons_quantile * (hi - lo));
        }
    }

    double abs_sum = 0.0;
    for (double c : scenario.thresholds) abs_sum += std::fabs(c);
    if (abs_sum > scenario.layout.layer_count() + 1e-12)
        throw ParameterError("scenario: sum |c_i| exceeds the episode length bound");

    if (I > 0) {
        HindsightProblem feas(scenario.layout);
        feas.model = scenario.model;
        feas.summed_losses = StageFunction(scenario.layout);
        feas.expected_constraints = scenario.constraints.means;
        feas.thresholds = scenario.thresholds;
        if (!feasible_with_slack(feas, spec.slater_slack))
            throw InfeasibleError("scenario: no policy satisfies the expected constraints "
                                  "with the requested slack");
    }
    return scenario;
}

}  // namespace ucpd
