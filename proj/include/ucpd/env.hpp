#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ucpd/layout.hpp"
#include "ucpd/occupancy.hpp"
#include "ucpd/rng.hpp"

namespace ucpd {

struct TransitionStep {
    int state;
    int action;
    int next_state;
};

/// One sampled episode: exactly L steps from the initial to the terminal state.
struct Trajectory {
    std::vector<TransitionStep> steps;
};

enum class LossKind { constant, switching, sinusoid, arbitrary };

/// Adversarial-but-oblivious loss schedule: a pure function of the episode
/// index with sup-norm at most 1. The base shape and (for switching) the set
/// of flipped edges are drawn once from the schedule seed.
struct LossSchedule {
    LossKind kind = LossKind::constant;
    StageFunction base;
    LayeredTensor flip_mask;   // 1 on edges whose sign alternates (switching)
    LayeredTensor phase;       // per-edge phases (sinusoid)
    int period = 1;            // episodes per phase / sinusoid period
    std::uint64_t seed = 0;    // drives the arbitrary kind
};

/// I stochastic constraint functions with fixed means: each draw is
/// mean + noise * (per-edge Rademacher signs), jointly normalized so that
/// sum_i sup|g_i^t| <= 1 on every draw.
struct ConstraintFamily {
    std::vector<StageFunction> means;
    std::vector<double> noise;  // amplitude per constraint

    int count() const { return static_cast<int>(means.size()); }
};

/// Ground-truth world: layout, kernel, loss schedule, constraint family and
/// thresholds. Construction is fully determined by the spec fields below, so
/// a scenario can be pinned by serializing them.
struct Scenario {
    MdpLayout layout;
    TransitionModel model;
    LossSchedule losses;
    ConstraintFamily constraints;
    std::vector<double> thresholds;  // c_i

    Scenario(MdpLayout l) : layout(std::move(l)) {}
};

/// Everything needed to rebuild a Scenario deterministically.
struct ScenarioSpec {
    std::vector<int> layer_sizes{1, 2, 2, 1};
    int actions = 2;
    std::uint64_t mdp_seed = 1;
    std::string loss_kind = "switching";
    std::uint64_t loss_seed = 2;
    int loss_period = 0;  // 0 -> floor(sqrt(T)) chosen by the harness
    int cons_count = 1;
    std::uint64_t cons_seed = 3;
    double cons_sup = 0.5;       // total sup-norm budget across constraint means
    double cons_noise = 0.05;    // total noise budget across constraints
    double cons_quantile = 0.3;  // threshold position in [min, max] of <g_i, theta>
    std::vector<double> thresholds;  // explicit c_i override; empty -> quantile rule
    double slater_slack = 0.0;       // required feasibility margin
};

/// Kernel rows drawn from the flat Dirichlet; deterministic in the seed.
std::pair<MdpLayout, TransitionModel> make_random_mdp(const std::vector<int>& layer_sizes,
                                                      int action_count, std::uint64_t seed);

/// Loss at episode t (1-based). Pure in (schedule, t); throws on t out of range.
StageFunction loss_at(const LossSchedule& schedule, int t, int horizon);

/// One draw of the I constraint functions for episode t.
std::vector<StageFunction> constraints_at(const ConstraintFamily& family, Rng& rng);

/// Walk the layers: a_k ~ pi(.|s_k), s_{k+1} ~ P(.|s_k, a_k).
Trajectory sample_episode(const TransitionModel& model, const Policy& policy,
                          const MdpLayout& layout, Rng& rng);

/// Exact occupancy of a policy under a kernel by the forward recursion
/// d(s0) = 1, theta(s,a,s') = d(s) pi(a|s) P(s'|s,a), d(s') = sum theta.
OccupancyMeasure true_occupancy(const Policy& policy, const TransitionModel& model,
                                const MdpLayout& layout);

double trajectory_loss(const StageFunction& f, const Trajectory& trajectory,
                       const MdpLayout& layout);

// loss schedule / constraint family construction from seeds (used by the
// scenario builder; exposed for tests)
LossSchedule make_loss_schedule(const MdpLayout& layout, const std::string& kind,
                                std::uint64_t seed, int period);
ConstraintFamily make_constraint_family(const MdpLayout& layout, int count, std::uint64_t seed,
                                        double sup_budget, double noise_budget);

/// Builds the scenario and verifies feasibility: there must exist theta in
/// the true occupancy polytope with <g_i, theta> <= c_i - slack for all i.
/// Throws InfeasibleError otherwise. horizon only sets the default period.
Scenario build_scenario(const ScenarioSpec& spec, int horizon);

}  // namespace ucpd
