#include "ucpd/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace ucpd {

namespace {

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

AgentConfig agent_config_for(const RunConfig& config, const std::vector<double>& thresholds) {
    AgentConfig agent;
    const int L = static_cast<int>(config.scenario.layer_sizes.size()) - 1;
    if (config.theorem_schedule) {
        agent = theorem_schedule(L, config.horizon, config.zeta, thresholds);
    } else {
        agent.v_weight = config.v_weight;
        agent.alpha = config.alpha;
        agent.lambda = config.lambda;
        agent.zeta = config.zeta;
        agent.horizon = config.horizon;
        agent.thresholds = thresholds;
    }
    agent.solver = config.solver;
    agent.known_model = config.known_model;
    agent.known_model_epsilon = config.known_model_epsilon;
    return agent;
}

}  // namespace

PreparedRun prepare_run(const RunConfig& config) {
    Scenario scenario = build_scenario(config.scenario, config.horizon);
    AgentConfig agent = agent_config_for(config, scenario.thresholds);

    HindsightProblem problem(scenario.layout);
    problem.model = scenario.model;
    problem.summed_losses = StageFunction(scenario.layout);
    for (int t = 1; t <= config.horizon; ++t)
        problem.summed_losses.axpy(1.0, 1.0, loss_at(scenario.losses, t, config.horizon));
    problem.expected_constraints = scenario.constraints.means;
    problem.thresholds = scenario.thresholds;

    const OracleSolution best = solve_best_fixed(problem);
    return PreparedRun{std::move(scenario), std::move(agent), best.theta, best.value};
}

RunLog run_experiment(const RunConfig& config, std::uint64_t seed, std::ostream* trace) {
    RunConfig overridden = config;
    overridden.seed = seed;
    return run_experiment(overridden, trace);
}

namespace {

void write_trace_line(std::ostream& out, int t, const OccupancyMeasure& theta) {
    nlohmann::json row;
    row["t"] = t;
    auto& blocks = row["theta"] = nlohmann::json::array();
    for (int k = 0; k < theta.layer_count(); ++k) {
        auto b = theta.block(k);
        blocks.push_back(std::vector<double>(b.begin(), b.end()));
    }
    out << row.dump() << "\n";
}

}  // namespace

RunLog run_experiment(const RunConfig& config, std::ostream* trace) {
    const auto start = std::chrono::steady_clock::now();
    PreparedRun prepared = prepare_run(config);
    const Scenario& scenario = prepared.scenario;
    const MdpLayout& layout = scenario.layout;
    const int L = layout.layer_count();
    const int T = config.horizon;

    UcpdAgent agent(layout, prepared.agent, &scenario.model);
    MetricsAccumulator metrics(layout, scenario.constraints.count());
    Rng cons_rng = derive_stream(config.seed, "cons");
    Rng act_rng = derive_stream(config.seed, "act");

    RunLog log;
    log.records.reserve(T);
    auto& summary = log.summary;
    const auto fail = [&](const std::string& what, int t) {
        summary.invariants_ok = false;
        if (summary.assertion_failures.size() < 32)
            summary.assertion_failures.push_back("t=" + std::to_string(t) + ": " + what);
    };

    double prev_q_norm = 0.0;
    for (int t = 1; t <= T; ++t) {
        OccupancyMeasure theta;
        Policy policy;
        try {
            auto out = agent.begin_episode();
            theta = std::move(out.first);
            policy = std::move(out.second);
        } catch (const SolverFailure& e) {
            summary.solver_failed = true;
            summary.invariants_ok = false;
            summary.assertion_failures.push_back("t=" + std::to_string(t) +
                                                 ": solver failure: " + e.what());
            break;
        }

        const ValidationReport validity = validate_occupancy(theta, layout);
        if (!validity.ok) fail("occupancy conditions violated (worst " +
                               format_real(validity.worst()) + ")", t);
        if (t >= 2) {
            const MembershipResult member = membership_check(theta, agent.state().cs, 1e-6);
            if (!member.ok)
                fail("confidence membership residual " + format_real(member.worst_residual), t);
        }

        const OccupancyMeasure theta_bar = true_occupancy(policy, scenario.model, layout);
        const Trajectory trajectory = sample_episode(scenario.model, policy, layout, act_rng);
        const StageFunction f_t = loss_at(scenario.losses, t, T);
        const std::vector<StageFunction> g_t = constraints_at(scenario.constraints, cons_rng);

        const int epoch_t = agent.state().counters.epoch_index;  // the epoch t was played in
        const double eps_max_t = agent.state().cs.max_epsilon();
        agent.end_episode(trajectory, f_t, g_t);
        metrics.observe(f_t, g_t, theta_bar, scenario.thresholds);

        const double q_norm = agent.dual_norm();
        if (std::fabs(q_norm - prev_q_norm) > 2.0 * L + 1e-9)
            fail("dual drift " + format_real(std::fabs(q_norm - prev_q_norm)) +
                 " exceeds 2L", t);
        for (double qi : agent.state().duals.q)
            if (qi < 0.0) fail("negative dual queue", t);
        prev_q_norm = q_norm;
        summary.max_q_norm = std::max(summary.max_q_norm, q_norm);

        EpisodeRecord rec;
        rec.t = t;
        rec.epoch = epoch_t;
        rec.loss_realized = trajectory_loss(f_t, trajectory, layout);
        rec.loss_expected = metrics.episode_losses.back();
        rec.cum_regret = regret(metrics, prepared.theta_star);
        rec.violation_norm = violation(metrics);
        rec.q_norm = q_norm;
        rec.eps_max = eps_max_t;
        rec.proj_iters = agent.last_report().iterations;
        log.records.push_back(rec);
        if (trace && config.trace_every > 0 && t % config.trace_every == 0)
            write_trace_line(*trace, t, theta);
    }

    summary.regret = regret(metrics, prepared.theta_star);
    summary.violation = violation(metrics);
    summary.epochs = agent.state().counters.epoch_index;
    const int SA = layout.total_states() * layout.action_count();
    if (T >= SA) {
        const double bound = epoch_count_bound(layout.total_states(), layout.action_count(), T);
        if (static_cast<double>(summary.epochs) > bound)
            fail("epoch count " + std::to_string(summary.epochs) + " exceeds bound " +
                 format_real(bound), T);
    }
    summary.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return log;
}

void write_csv(const RunLog& log, std::ostream& out) {
    out << kCsvHeader << "\n";
    for (const auto& r : log.records) {
        out << r.t << ',' << r.epoch << ',' << format_real(r.loss_realized) << ','
            << format_real(r.loss_expected) << ',' << format_real(r.cum_regret) << ','
            << format_real(r.violation_norm) << ',' << format_real(r.q_norm) << ','
            << format_real(r.eps_max) << ',' << r.proj_iters << "\n";
    }
}

std::string csv_string(const RunLog& log) {
    std::ostringstream out;
    write_csv(log, out);
    return out.str();
}

PowerLawFit fit_power_law(const std::vector<double>& horizons,
                          const std::vector<double>& values) {
    PowerLawFit fit;
    const std::size_t n = horizons.size();
    if (n < 2 || values.size() != n) return fit;
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        lx[i] = std::log(horizons[i]);
        ly[i] = std::log(std::max(values[i], 1e-12));
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    fit.exponent = sxy / sxx;
    fit.log_intercept = my - fit.exponent * mx;
    fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

SweepResult sweep(const RunConfig& base, const std::vector<int>& horizons, int seed_count) {
    if (horizons.size() < 2) throw ParameterError("sweep: need at least two horizons");
    if (seed_count < 1) throw ParameterError("sweep: need at least one seed");

    struct Cell {
        int horizon;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (int horizon : horizons)
        for (int s = 0; s < seed_count; ++s)
            cells.push_back({horizon, base.seed + static_cast<std::uint64_t>(s)});

    const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::vector<SweepCell> results(cells.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            RunConfig cfg = base;
            cfg.horizon = cells[i].horizon;
            cfg.seed = cells[i].seed;
            const RunLog log = run_experiment(cfg);
            results[i] = SweepCell{cells[i].horizon, cells[i].seed,       log.summary.regret,
                                   log.summary.violation, log.summary.epochs,
                                   log.summary.max_q_norm, log.summary.invariants_ok};
        }
    };
    std::vector<std::future<void>> futures;
    for (unsigned w = 1; w < workers && w < cells.size(); ++w)
        futures.push_back(std::async(std::launch::async, worker));
    worker();
    for (auto& f : futures) f.get();

    SweepResult out;
    out.cells = std::move(results);
    std::sort(out.cells.begin(), out.cells.end(), [](const SweepCell& a, const SweepCell& b) {
        return a.horizon != b.horizon ? a.horizon < b.horizon : a.seed < b.seed;
    });
    for (const auto& c : out.cells) out.all_ok = out.all_ok && c.ok;

    std::vector<double> ts, mean_regret, mean_violation, mean_q;
    for (int horizon : horizons) {
        double r = 0.0, v = 0.0, q = 0.0;
        int n = 0;
        for (const auto& c : out.cells)
            if (c.horizon == horizon) {
                r += c.regret;
                v += c.violation;
                q += c.max_q_norm;
                ++n;
            }
        ts.push_back(horizon);
        mean_regret.push_back(r / n);
        mean_violation.push_back(v / n);
        mean_q.push_back(q / n);
    }
    out.regret_fit = fit_power_law(ts, mean_regret);
    out.violation_fit = fit_power_law(ts, mean_violation);
    out.q_fit = fit_power_law(ts, mean_q);
    return out;
}

}  // namespace ucpd
