// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Expensive sweeps run once and feed several criteria.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "ucpd/harness.hpp"

using namespace ucpd;
using namespace ucpd::testing;

namespace {

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

std::vector<Check> g_checks;

void record(const std::string& name, bool pass, const std::string& detail) {
    g_checks.push_back({name, pass, detail});
    std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

std::string g1_config_text() {
    return "T = 1000\n"
           "seed = 1\n"
           "schedule = theorem\n"
           "zeta = 0.1\n"
           "scenario.layers = 1,3,3,1\n"
           "scenario.actions = 2\n"
           "scenario.mdp_seed = 101\n"
           "scenario.loss_kind = switching\n"
           "scenario.loss_seed = 102\n"
           "scenario.cons_count = 1\n"
           "scenario.cons_seed = 103\n"
           "scenario.cons_sup = 0.5\n"
           "scenario.cons_noise = 0.05\n"
           "scenario.cons_quantile = 0.3\n"
           "scenario.slater_slack = 0.05\n";
}

double elapsed_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// criteria 1, 2, 3, 5 share the reference sweep
void scaling_criteria() {
    const auto start = std::chrono::steady_clock::now();
    RunConfig cfg = parse_config_text(g1_config_text(), ".");
    const std::vector<int> horizons{1000, 4000, 16000};
    const SweepResult result = sweep(cfg, horizons, 5);
    const double wall = elapsed_since(start);

    std::vector<double> mean_regret(horizons.size(), 0.0), mean_violation(horizons.size(), 0.0);
    bool cells_ok = true;
    int max_epoch_overshoot = 0;
    for (const auto& cell : result.cells) {
        const std::size_t h = cell.horizon == 1000 ? 0 : (cell.horizon == 4000 ? 1 : 2);
        mean_regret[h] += cell.regret / 5.0;
        mean_violation[h] += cell.violation / 5.0;
        cells_ok = cells_ok && cell.ok;
        const double bound = epoch_count_bound(8, 2, cell.horizon);
        if (cell.epochs > bound) ++max_epoch_overshoot;
    }

    const bool ratio_decreasing = mean_regret[0] / 1000.0 > mean_regret[1] / 4000.0 &&
                                  mean_regret[1] / 4000.0 > mean_regret[2] / 16000.0;
    const bool c1 = result.regret_fit.exponent <= 0.65 && ratio_decreasing;
    record("criterion 1 (regret scaling)", c1,
           fmt("fit p=%.3f (<=0.65), R2=%.3f, regret/T = %.4f / %.4f / %.4f, wall=%.0fs",
               result.regret_fit.exponent, result.regret_fit.r_squared, mean_regret[0] / 1000.0,
               mean_regret[1] / 4000.0, mean_regret[2] / 16000.0, wall));

    const double v_rate_1k = mean_violation[0] / 1000.0;
    const double v_rate_16k = mean_violation[2] / 16000.0;
    const bool c2 = v_rate_16k <= 0.5 * v_rate_1k && result.violation_fit.exponent <= 0.75;
    record("criterion 2 (violation scaling)", c2,
           fmt("fit p=%.3f (<=0.75), violation/T %.5f -> %.5f (need halving)",
               result.violation_fit.exponent, v_rate_1k, v_rate_16k));

    // drift and non-negativity are asserted inside every run; cells_ok
    // collects those assertions across the whole sweep
    record("criterion 3 (dual drift invariant)", cells_ok,
           cells_ok ? "every run kept |d||Q||| <= 2L and Q >= 0"
                    : "some run violated the drift or positivity assertions");

    record("criterion 5 (epoch bound)", max_epoch_overshoot == 0,
           fmt("no cell exceeded |S||A| log2(8T/|S||A|); cells=%d",
               static_cast<int>(result.cells.size())));

    const bool q_sublinear = result.q_fit.exponent <= 0.75;
    record("invariant (dual queue sublinear)", q_sublinear,
           fmt("max_t ||Q(t)|| fit p=%.3f (<=0.75)", result.q_fit.exponent));
}

void coverage_criterion() {
    const auto start = std::chrono::steady_clock::now();
    const MdpLayout layout({1, 3, 3, 1}, 2);
    auto [made_layout, model] = make_random_mdp({1, 3, 3, 1}, 2, 2024);
    const int runs = 200, T = 500;
    const double zeta = 0.1;
    int covered = 0;
    const Policy uniform = recover_policy(uniform_occupancy(layout));
    for (int run = 0; run < runs; ++run) {
        Rng rng(derive_seed(run + 1, "acceptance-coverage"));
        Counters counters(layout);
        bool ok = true;
        for (int t = 1; t <= T; ++t) {
            const auto traj = sample_episode(model, uniform, layout, rng);
            for (const auto& step : traj.steps)
                record_transition(counters, layout, step.state, step.action, step.next_state);
            if (epoch_trigger(counters)) {
                const auto cs = advance_epoch(counters, layout, T, zeta);
                for (int k = 0; k < layout.layer_count() && ok; ++k)
                    for (int i = 0; i < layout.layer_size(k) && ok; ++i)
                        for (int a = 0; a < layout.action_count() && ok; ++a) {
                            double dist = 0.0;
                            for (int j = 0; j < layout.layer_size(k + 1); ++j)
                                dist += std::fabs(model.kernel.at(k, i, a, j) -
                                                  cs.p_hat.at(k, i, a, j));
                            if (dist > cs.eps(k, i, a)) ok = false;
                        }
            }
        }
        if (ok) ++covered;
    }
    const double fraction = static_cast<double>(covered) / runs;
    record("criterion 4 (confidence coverage)", fraction >= 1.0 - zeta - 0.05,
           fmt("true kernel inside all confidence sets in %.1f%% of %d runs (need >= 85%%), "
               "wall=%.0fs",
               100.0 * fraction, runs, elapsed_since(start)));
}

void projection_criterion() {
    const auto start = std::chrono::steady_clock::now();
    const MdpLayout toy_a({1, 2, 1}, 2);
    const MdpLayout toy_b({1, 2, 2, 1}, 2);
    const MdpLayout simplex_toy({1, 1, 1}, 2);
    Rng rng(31337);

    int feasibility_failures = 0, certificate_failures = 0, solver_failures = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const MdpLayout& layout = trial % 2 == 0 ? toy_a : toy_b;
        const auto prev = mix_with_uniform(random_occupancy(layout, rng), 0.05 + 0.2 * rng.uniform());
        const PenaltyVector psi{random_stage_function(layout, rng, 5.0)};
        const double alpha = 0.3 + 3.0 * rng.uniform();
        const auto cs = random_confidence_set(layout, rng, 0.05, 2.4, 0.15);
        const auto pushed = exponential_step(prev, psi, alpha);
        try {
            const auto [theta, report] = kl_projection(pushed, prev, psi, alpha, cs);
            const auto validity = validate_occupancy(theta, layout);
            const auto member = membership_check(theta, cs, 1e-6);
            if (!validity.ok || !member.ok) ++feasibility_failures;

            const double mine =
                inner_product(psi.psi, theta) + alpha * unnormalized_kl(theta, prev);
            for (int probe = 0; probe < 1000; ++probe) {
                const auto candidate = random_member(cs, layout, rng);
                OccupancyMeasure blend = theta;
                const double w = rng.uniform();
                blend.axpy(1.0 - w, w, candidate);
                const double theirs =
                    inner_product(psi.psi, blend) + alpha * unnormalized_kl(blend, prev);
                if (mine > theirs + 1e-5) {
                    ++certificate_failures;
                    break;
                }
            }
        } catch (const SolverFailure&) {
            ++solver_failures;
        }
    }

    // 1-simplex toy against the exhaustive grid
    double worst_gap = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto prev = mix_with_uniform(random_occupancy(simplex_toy, rng), 0.2);
        const PenaltyVector psi{random_stage_function(simplex_toy, rng, 3.0)};
        const double alpha = 0.4 + rng.uniform();
        auto cs = random_confidence_set(simplex_toy, rng, 0.1, 0.5, 0.0);
        for (auto& e : cs.epsilon) e = 2.0 + rng.uniform();
        const auto pushed = exponential_step(prev, psi, alpha);
        const auto [theta, report] = kl_projection(pushed, prev, psi, alpha, cs);
        double grid_total = 0.0;
        for (int k = 0; k < 2; ++k) {
            double best = 1e100;
            for (int step = 1; step < 10000; ++step) {
                const double x = 1e-4 * step;
                const double vals[2] = {x, 1.0 - x};
                double val = 0.0;
                for (int e = 0; e < 2; ++e)
                    val += psi.psi.block(k)[e] * vals[e] +
                           alpha * (vals[e] * std::log(vals[e] / prev.block(k)[e]) - vals[e] +
                                    prev.block(k)[e]);
                best = std::min(best, val);
            }
            grid_total += best;
        }
        const double mine = inner_product(psi.psi, theta) + alpha * unnormalized_kl(theta, prev);
        worst_gap = std::max(worst_gap, mine - grid_total);
    }

    const bool pass = feasibility_failures == 0 && certificate_failures == 0 &&
                      solver_failures == 0 && worst_gap <= 1e-6;
    record("criterion 6 (projection correctness)", pass,
           fmt("500 instances: feas fails=%d, certificate fails=%d, solver fails=%d, "
               "grid gap=%.2e (<=1e-6), wall=%.0fs",
               feasibility_failures, certificate_failures, solver_failures, worst_gap,
               elapsed_since(start)));
}

void gradient_criterion() {
    const MdpLayout layout({1, 2, 2, 1}, 2);
    Rng rng(404);
    const double step = 1e-5;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto mixed = mix_with_uniform(random_occupancy(layout, rng), 0.1);
        const auto cs = random_confidence_set(layout, rng, 0.1, 1.5, 0.2);
        const PenaltyVector psi{random_stage_function(layout, rng, 2.0)};
        const double alpha = 0.5 + 2.0 * rng.uniform();
        DualPoint point(layout);
        for (int k = 0; k < layout.layer_count(); ++k)
            for (int e = 0; e < layout.block_size(k); ++e) {
                point.mu_plus.block(k)[e] = rng.uniform();
                point.mu_minus.block(k)[e] = rng.uniform();
            }
        for (auto& b : point.beta) b = 2.0 * rng.uniform() - 1.0;
        const auto [value, grad] = dual_objective(point, mixed, psi, alpha, cs);
        (void)value;

        DualPoint probe = point;
        const auto fd = [&](double* coord, double analytic) {
            const double keep = *coord;
            *coord = keep + step;
            const double hi = dual_objective(probe, mixed, psi, alpha, cs).first;
            *coord = keep - step;
            const double lo = dual_objective(probe, mixed, psi, alpha, cs).first;
            *coord = keep;
            worst = std::max(worst, std::fabs((hi - lo) / (2.0 * step) - analytic));
        };
        for (int k = 0; k < layout.layer_count(); ++k)
            for (int e = 0; e < layout.block_size(k); ++e) {
                fd(&probe.mu_plus.block(k)[e], grad.mu_plus.block(k)[e]);
                fd(&probe.mu_minus.block(k)[e], grad.mu_minus.block(k)[e]);
            }
        for (std::size_t s = 0; s < probe.beta.size(); ++s) fd(&probe.beta[s], grad.beta[s]);
    }
    record("criterion 7 (gradient check)", worst <= 1e-6,
           fmt("max |analytic - central difference| = %.2e (<=1e-6)", worst));
}

void oracle_criterion() {
    const MdpLayout layout({1, 2, 1}, 2);
    Rng rng(909);
    double worst_gap = 0.0, worst_residual = 0.0;
    int failures = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto model = random_kernel(layout, rng);
        const auto losses = random_stage_function(layout, rng);
        auto g = random_stage_function(layout, rng, 0.5);
        for (int k = 0; k < layout.layer_count(); ++k)
            for (auto& v : g.block(k)) v = std::fabs(v);
        const auto [lo, hi] = constraint_value_range(layout, model, g);
        HindsightProblem problem(layout);
        problem.model = model;
        problem.summed_losses = losses;
        problem.expected_constraints = {g};
        problem.thresholds = {lo + 0.35 * (hi - lo)};

        const auto lp = solve_best_fixed(problem);
        const auto bf = brute_force_best_fixed(problem, 1e-5);
        if (!bf) {
            ++failures;
            continue;
        }
        worst_gap = std::max(worst_gap, std::fabs(lp.value - bf->value));
        worst_residual = std::max(worst_residual, lp.constraint_residual);
    }
    const bool pass = failures == 0 && worst_gap <= 1e-4 && worst_residual <= 1e-9;
    record("criterion 8 (oracle equivalence)", pass,
           fmt("20 problems: max |LP - brute force| = %.2e (<=1e-4), max residual = %.2e (<=1e-9)",
               worst_gap, worst_residual));
}

void known_model_criterion() {
    RunConfig cfg = parse_config_text(g1_config_text(), ".");
    cfg.horizon = 300;
    cfg.known_model = true;
    cfg.known_model_epsilon = 1e-7;

    const PreparedRun prepared = prepare_run(cfg);
    const Scenario& scenario = prepared.scenario;
    UcpdAgent agent(scenario.layout, prepared.agent, &scenario.model);
    Rng cons_rng = derive_stream(cfg.seed, "cons");
    Rng act_rng = derive_stream(cfg.seed, "act");
    double worst = 0.0;
    for (int t = 1; t <= cfg.horizon; ++t) {
        auto [theta, policy] = agent.begin_episode();
        if (t >= 2) {
            for (int k = 0; k < scenario.layout.layer_count(); ++k)
                for (int i = 0; i < scenario.layout.layer_size(k); ++i)
                    for (int a = 0; a < scenario.layout.action_count(); ++a) {
                        double m = 0.0;
                        for (int j = 0; j < scenario.layout.layer_size(k + 1); ++j)
                            m += theta.at(k, i, a, j);
                        if (m <= 0.0) continue;
                        double dist = 0.0;
                        for (int j = 0; j < scenario.layout.layer_size(k + 1); ++j)
                            dist += std::fabs(theta.at(k, i, a, j) / m -
                                              scenario.model.prob(k, i, a, j));
                        worst = std::max(worst, dist);
                    }
        }
        agent.end_episode(sample_episode(scenario.model, policy, scenario.layout, act_rng),
                          loss_at(scenario.losses, t, cfg.horizon),
                          constraints_at(scenario.constraints, cons_rng));
    }
    record("criterion 9 (degenerate reduction)", worst <= 1e-6,
           fmt("known-model mode: worst condition-(c) L1 residual = %.2e (<=1e-6)", worst));
}

void determinism_criterion() {
    RunConfig cfg = parse_config_text(g1_config_text(), ".");
    cfg.horizon = 200;
    const std::string a = csv_string(run_experiment(cfg));
    const std::string b = csv_string(run_experiment(cfg));
    record("criterion 10 (determinism)", a == b && !a.empty(),
           a == b ? "two runs produced byte-identical CSV logs"
                  : "CSV logs differ between identical runs");
}

}  // namespace

int main() {
    scaling_criteria();     // criteria 1, 2, 3, 5 + dual-queue invariant
    coverage_criterion();   // criterion 4
    projection_criterion(); // criterion 6
    gradient_criterion();   // criterion 7
    oracle_criterion();     // criterion 8
    known_model_criterion();  // criterion 9
    determinism_criterion();  // criterion 10

    int failed = 0;
    for (const auto& check : g_checks) failed += check.pass ? 0 : 1;
    std::printf("%d/%d acceptance checks passed\n", static_cast<int>(g_checks.size()) - failed,
                static_cast<int>(g_checks.size()));
    return failed == 0 ? 0 : 1;
}
