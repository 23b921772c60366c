#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "apprentice/apprentice.hpp"
#include "apprentice/environments.hpp"
#include "apprentice/quantum_cost.hpp"

namespace apprentice {

/// Library and run-log format version, embedded in every run.json.
inline constexpr const char* kVersion = "1.0.0";

/// Invalid or inconsistent configuration; messages name the offending field.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Filesystem failures (unreadable inputs, unwritable outputs).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shortest decimal representation that parses back to the same double
/// (std::to_chars); NaN prints as "nan".
std::string format_double(double v);

/// Fully assembled experiment: environment, demonstrator, run parameters.
struct ExperimentSetup {
    Mdp mdp;
    FeatureMap features;
    ExpertSpec expert;
    ApprenticeConfig config;
    nlohmann::json echo;  // normalized config for the run log
};

/**
 * Builds an experiment from a run config object with fields mode, epsilon,
 * eps_rl, delta, rho?, max_iterations, seed, rl_generative_samples?, env
 * (kind gridworld | random | file) and expert (kind hidden_w |
 * mixture_of_optimal | mu_vector).  Throws ConfigError naming the field on
 * any violation.
 */
ExperimentSetup build_experiment(const nlohmann::json& config);

nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

nlohmann::json run_result_json(const RunResult& result, const nlohmann::json& echo);
std::string iterations_csv(const RunResult& result, bool timed);
std::string diagnostics_csv(const RunResult& result);

struct SweepCell {
    double epsilon = 0.0;
    double eps_rl = 0.0;
    int k = 0;
    RunResult result;
};

/// Grid re-runs over epsilon / eps_rl / k lists applied to a base run config.
std::vector<SweepCell> run_sweep(const nlohmann::json& sweep_config);
std::string sweep_csv(const std::vector<SweepCell>& cells);

CostParams parse_cost_params(const nlohmann::json& params);
nlohmann::json cost_report_json(const CostReport& report);
std::string subroutine_csv(const CostReport& report);
std::string crossover_csv(const std::vector<SweepRow>& rows);

}  // namespace apprentice
