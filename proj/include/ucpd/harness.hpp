#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ucpd/agent.hpp"
#include "ucpd/config.hpp"
#include "ucpd/oracle.hpp"

namespace ucpd {

struct EpisodeRecord {
    int t = 0;
    int epoch = 0;
    double loss_realized = 0.0;   // sum of f^t along the sampled path
    double loss_expected = 0.0;   // <f^t, theta_bar^t>
    double cum_regret = 0.0;
    double violation_norm = 0.0;
    double q_norm = 0.0;
    double eps_max = 0.0;
    long proj_iters = 0;
};

struct RunSummary {
    double regret = 0.0;
    double violation = 0.0;
    int epochs = 0;
    double max_q_norm = 0.0;
    double wall_seconds = 0.0;
    bool invariants_ok = true;
    bool solver_failed = false;
    std::vector<std::string> assertion_failures;
};

struct RunLog {
    std::vector<EpisodeRecord> records;
    RunSummary summary;
};

inline constexpr const char* kCsvHeader =
    "t,epoch,loss_realized,loss_expected,cum_regret,violation_norm,q_norm,eps_max,proj_iters";

void write_csv(const RunLog& log, std::ostream& out);
std::string csv_string(const RunLog& log);

/// Executes T episodes of the full loop: solve, act, observe, update.
/// Deterministic given (config, seed). Invariant assertions (dual drift,
/// non-negativity, feasibility residuals, epoch bound) are recorded in the
/// summary rather than aborting; a solver failure stops the run early and keeps
/// the partial log. When trace is given and trace_every > 0, full theta
/// snapshots go out as JSONL every trace_every episodes.
RunLog run_experiment(const RunConfig& config, std::ostream* trace = nullptr);

/// Overrides the master seed of a parsed config (CLI --seed).
RunLog run_experiment(const RunConfig& config, std::uint64_t seed, std::ostream* trace);

struct SweepCell {
    int horizon = 0;
    std::uint64_t seed = 0;
    double regret = 0.0;
    double violation = 0.0;
    int epochs = 0;
    double max_q_norm = 0.0;
    bool ok = true;
};

struct PowerLawFit {
    double exponent = 0.0;  // p in y ~ c T^p
    double r_squared = 0.0;
    double log_intercept = 0.0;
};

struct SweepResult {
    std::vector<SweepCell> cells;  // ordered by (horizon, seed)
    PowerLawFit regret_fit;        // on per-horizon means
    PowerLawFit violation_fit;
    PowerLawFit q_fit;
    bool all_ok = true;
};

/// Runs every (horizon, seed) cell, in parallel when hardware allows; the
/// merged table and fits are deterministic regardless of scheduling.
SweepResult sweep(const RunConfig& base, const std::vector<int>& horizons, int seed_count);

/// Least-squares fit of log y against log T. Non-positive values are clamped
/// to 1e-12 so fully-satisfied violation columns do not break the fit.
PowerLawFit fit_power_law(const std::vector<double>& horizons, const std::vector<double>& values);

// scenario construction + best-fixed benchmark for a config (shared by the
// run loop, the oracle subcommand and the acceptance suite)
struct PreparedRun {
    Scenario scenario;
    AgentConfig agent;
    OccupancyMeasure theta_star;
    double theta_star_value = 0.0;
};
PreparedRun prepare_run(const RunConfig& config);

}  // namespace ucpd
