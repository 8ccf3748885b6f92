#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ucpd/harness.hpp"

namespace {

int verbosity() {
    const char* env = std::getenv("UCPD_VERBOSITY");
    if (!env) return 1;
    const std::string v(env);
    if (v == "quiet") return 0;
    if (v == "debug") return 2;
    return 1;
}

void info(const std::string& msg) {
    if (verbosity() >= 1) std::cerr << msg << "\n";
}

std::string run_basename(const ucpd::RunConfig& cfg) {
    return "run_T" + std::to_string(cfg.horizon) + "_seed" + std::to_string(cfg.seed);
}

void print_summary(const ucpd::RunSummary& s) {
    std::cout << "regret = " << s.regret << "\n"
              << "violation = " << s.violation << "\n"
              << "epochs = " << s.epochs << "\n"
              << "max_q_norm = " << s.max_q_norm << "\n"
              << "wall_seconds = " << s.wall_seconds << "\n"
              << "invariants_ok = " << (s.invariants_ok ? 1 : 0) << "\n";
    for (const auto& msg : s.assertion_failures) std::cerr << "assertion failed: " << msg << "\n";
}

int cmd_run(const std::string& config_path, std::uint64_t seed, bool seed_given,
            const std::string& out_dir) {
    ucpd::RunConfig cfg = ucpd::parse_config(config_path);
    if (seed_given) cfg.seed = seed;
    std::filesystem::create_directories(out_dir);

    std::ofstream trace_file;
    std::ostream* trace = nullptr;
    if (cfg.trace_every > 0) {
        trace_file.open(out_dir + "/" + run_basename(cfg) + ".trace.jsonl");
        trace = &trace_file;
    }

    info("running T=" + std::to_string(cfg.horizon) + " seed=" + std::to_string(cfg.seed));
    const ucpd::RunLog log = ucpd::run_experiment(cfg, trace);

    const std::string csv_path = out_dir + "/" + run_basename(cfg) + ".csv";
    std::ofstream csv(csv_path);
    ucpd::write_csv(log, csv);
    csv.close();
    info("log written to " + csv_path);

    print_summary(log.summary);
    return log.summary.invariants_ok && !log.summary.solver_failed ? 0 : 1;
}

int cmd_sweep(const std::string& config_path, const std::vector<int>& horizons, int seeds,
              const std::string& out_dir) {
    const ucpd::RunConfig cfg = ucpd::parse_config(config_path);
    const ucpd::SweepResult result = ucpd::sweep(cfg, horizons, seeds);

    std::filesystem::create_directories(out_dir);
    const std::string table_path = out_dir + "/sweep.csv";
    std::ofstream table(table_path);
    table << "T,seed,regret,violation,epochs,max_q_norm\n";
    for (const auto& c : result.cells)
        table << c.horizon << ',' << c.seed << ',' << c.regret << ',' << c.violation << ','
              << c.epochs << ',' << c.max_q_norm << "\n";
    table.close();
    info("sweep table written to " + table_path);

    std::cout << "regret_fit: p = " << result.regret_fit.exponent
              << ", R2 = " << result.regret_fit.r_squared << "\n";
    std::cout << "violation_fit: p = " << result.violation_fit.exponent
              << ", R2 = " << result.violation_fit.r_squared << "\n";
    std::cout << "q_fit: p = " << result.q_fit.exponent << ", R2 = " << result.q_fit.r_squared
              << "\n";
    return result.all_ok ? 0 : 1;
}

int cmd_oracle(const std::string& config_path) {
    const ucpd::RunConfig cfg = ucpd::parse_config(config_path);
    const ucpd::PreparedRun prepared = ucpd::prepare_run(cfg);
    std::cout << "objective = " << prepared.theta_star_value << "\n";
    for (std::size_t i = 0; i < prepared.scenario.thresholds.size(); ++i) {
        const double used =
            ucpd::inner_product(prepared.scenario.constraints.means[i], prepared.theta_star);
        std::cout << "constraint[" << i << "]: <g,theta*> = " << used
                  << " (threshold " << prepared.scenario.thresholds[i] << ")\n";
    }
    const auto& theta = prepared.theta_star;
    for (int k = 0; k < theta.layer_count(); ++k) {
        std::cout << "layer " << k << ":";
        for (double v : theta.block(k)) std::cout << ' ' << v;
        std::cout << "\n";
    }
    return 0;
}

int cmd_validate(const std::string& config_path) {
    try {
        const ucpd::RunConfig cfg = ucpd::parse_config(config_path);
        const ucpd::PreparedRun prepared = ucpd::prepare_run(cfg);
        // dry-run checks: initialization is feasible, radii are sane
        const auto uniform = ucpd::uniform_occupancy(prepared.scenario.layout);
        const auto report = ucpd::validate_occupancy(uniform, prepared.scenario.layout);
        if (!report.ok) {
            std::cerr << "uniform initialization violates the polytope conditions\n";
            return 1;
        }
        prepared.agent.validate();
        std::cout << "config ok: T=" << cfg.horizon << " L=" << prepared.scenario.layout.layer_count()
                  << " |S|=" << prepared.scenario.layout.total_states()
                  << " |A|=" << prepared.scenario.layout.action_count()
                  << " I=" << prepared.scenario.constraints.count()
                  << " V=" << prepared.agent.v_weight << " alpha=" << prepared.agent.alpha
                  << " lambda=" << prepared.agent.lambda << "\n";
        std::cout << "scenario:\n" << ucpd::serialize_scenario(cfg.scenario);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "validate: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"online constrained-MDP learner: seeded runs, sweeps and benchmarks"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".";
    std::uint64_t seed = 0;
    std::vector<int> horizons;
    int seeds = 1;

    auto* run = app.add_subcommand("run", "execute one seeded run and write its CSV log");
    run->add_option("--config", config_path, "config file")->required();
    auto* seed_opt = run->add_option("--seed", seed, "master seed override");
    run->add_option("--out", out_dir, "output directory");

    auto* swp = app.add_subcommand("sweep", "run a (horizon, seed) grid and fit scaling laws");
    swp->add_option("--config", config_path, "config file")->required();
    swp->add_option("--horizons", horizons, "comma-separated horizons")
        ->required()
        ->delimiter(',');
    swp->add_option("--seeds", seeds, "number of consecutive master seeds");
    swp->add_option("--out", out_dir, "output directory");

    auto* orc = app.add_subcommand("oracle", "print the best fixed occupancy and its value");
    orc->add_option("--config", config_path, "config file")->required();

    auto* val = app.add_subcommand("validate", "dry-run invariant check of a config");
    val->add_option("--config", config_path, "config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, seed, seed_opt->count() > 0, out_dir);
        if (swp->parsed()) return cmd_sweep(config_path, horizons, seeds, out_dir);
        if (orc->parsed()) return cmd_oracle(config_path);
        if (val->parsed()) return cmd_validate(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
