#pragma once

#include <cstdint>
#include <string>

#include "ucpd/env.hpp"
#include "ucpd/orlp.hpp"

namespace ucpd {

/// One seeded run: scenario, agent parameters, horizon, solver knobs.
/// Parsed from flat key=value files; unknown and duplicate keys are errors.
struct RunConfig {
    int horizon = 1;            // T
    std::uint64_t seed = 0;     // master seed; sub-streams derive from it
    bool theorem_schedule = true;
    double v_weight = 0.0;      // explicit V (schedule = explicit)
    double alpha = 0.0;
    double lambda = 0.0;
    double zeta = 0.1;
    bool known_model = false;
    double known_model_epsilon = 1e-7;
    SolverOptions solver;
    int trace_every = 0;        // JSONL theta snapshots every k episodes, 0 = off
    ScenarioSpec scenario;
    std::string scenario_path;  // non-empty when the scenario came from a file
};

RunConfig parse_config(const std::string& path);
// base_dir resolves relative scenario_file references
RunConfig parse_config_text(const std::string& text, const std::string& base_dir);

ScenarioSpec parse_scenario_file(const std::string& path);

/// Flat key=value serialization of a (possibly resolved) scenario spec, so a
/// generated scenario can be pinned and shared.
std::string serialize_scenario(const ScenarioSpec& spec);

}  // namespace ucpd
