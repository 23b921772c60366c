#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "apprentice/experiment.hpp"
#include "apprentice/feature_expectation.hpp"

namespace {

using namespace apprentice;

constexpr int kExitOk = 0;
constexpr int kExitBadConfig = 1;
constexpr int kExitMaxIterations = 2;
constexpr int kExitIo = 3;

std::optional<std::uint64_t> seed_override_from_env() {
    const char* s = std::getenv("APPRENTICE_SEED");
    if (!s || !*s) return std::nullopt;
    char* end = nullptr;
    unsigned long long v = std::strtoull(s, &end, 10);
    if (end == s || *end != '\0')
        throw ConfigError("config error: field 'APPRENTICE_SEED': must be an unsigned integer");
    return static_cast<std::uint64_t>(v);
}

std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

nlohmann::json load_config(const std::string& path, std::optional<std::uint64_t> seed_override) {
    nlohmann::json cfg = read_json_file(path);
    if (seed_override && cfg.is_object()) cfg["seed"] = *seed_override;
    return cfg;
}

int finish_run(const RunResult& result) {
    std::cout << "status: " << (result.status == RunStatus::Converged    ? "converged"
                                : result.status == RunStatus::HullReached ? "hull_reached"
                                                                          : "max_iterations")
              << "  iterations: " << result.iterations
              << "  dist_min: " << format_double(result.records.back().dist_min)
              << "  threshold: " << format_double(result.threshold) << "\n";
    for (const std::string& w : result.warnings) std::cerr << "warning: " << w << "\n";
    return result.status == RunStatus::MaxIterations ? kExitMaxIterations : kExitOk;
}

int cmd_run(const std::string& config_path, const std::string& out_dir, bool timed_csv) {
    nlohmann::json cfg = load_config(config_path, seed_override_from_env());
    ExperimentSetup setup = build_experiment(cfg);
    RunResult result = run_apprenticeship(setup.mdp, setup.features, setup.expert, setup.config);
    write_text_file(join(out_dir, "run.json"), run_result_json(result, setup.echo).dump(2) + "\n");
    write_text_file(join(out_dir, "iterations.csv"), iterations_csv(result, timed_csv));
    return finish_run(result);
}

int cmd_diag(const std::string& config_path, const std::string& out_dir, bool timed_csv) {
    nlohmann::json cfg = load_config(config_path, seed_override_from_env());
    if (cfg.is_object()) cfg["mode"] = "ideal";
    ExperimentSetup setup = build_experiment(cfg);
    RunResult result = run_apprenticeship(setup.mdp, setup.features, setup.expert, setup.config);
    write_text_file(join(out_dir, "run.json"), run_result_json(result, setup.echo).dump(2) + "\n");
    write_text_file(join(out_dir, "iterations.csv"), iterations_csv(result, timed_csv));
    write_text_file(join(out_dir, "diagnostics.csv"), diagnostics_csv(result));

    int checked = 0, ok = 0, hyp = 0;
    for (const IterationRecord& rec : result.records) {
        if (!std::isfinite(rec.ratio_observed) || !std::isfinite(rec.ratio_bound)) continue;
        ++checked;
        if (rec.bound_ok) ++ok;
        if (rec.hypotheses_hold) ++hyp;
    }
    std::cout << "contraction: " << ok << "/" << checked
              << " diagnosed iterations within the ratio bound (hypotheses held on " << hyp
              << ")\n";
    if (result.bound)
        std::cout << "termination: n=" << result.iterations << ", iteration bound "
                  << format_double(result.bound->iterations) << " (simplified "
                  << format_double(result.bound->simplified) << ")\n";
    else
        std::cout << "termination: n=" << result.iterations << ", iteration bound vacuous\n";
    return finish_run(result);
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir) {
    nlohmann::json cfg = load_config(config_path, std::nullopt);
    if (auto seed = seed_override_from_env(); seed && cfg.is_object() && cfg.contains("base"))
        cfg["base"]["seed"] = *seed;
    std::vector<SweepCell> cells = run_sweep(cfg);
    write_text_file(join(out_dir, "sweep.csv"), sweep_csv(cells));
    std::cout << "sweep: " << cells.size() << " cells written\n";
    return kExitOk;
}

int cmd_cost(const std::string& config_path, const std::string& out_dir) {
    nlohmann::json cfg = read_json_file(config_path);
    if (!cfg.is_object()) throw ConfigError("config error: root must be an object");
    CostParams params = parse_cost_params(
        cfg.contains("params") ? cfg.at("params") : cfg);
    CostReport report = subroutine_costs(params);
    write_text_file(join(out_dir, "cost_report.json"), cost_report_json(report).dump(2) + "\n");
    write_text_file(join(out_dir, "subroutines.csv"), subroutine_csv(report));
    if (cfg.contains("grid")) {
        const nlohmann::json& grid_json = cfg.at("grid");
        if (!grid_json.is_object())
            throw ConfigError("config error: field 'grid': must be an object");
        std::map<std::string, std::vector<double>> grid;
        for (const auto& [key, values] : grid_json.items()) {
            if (!values.is_array())
                throw ConfigError("config error: field 'grid." + key + "': must be an array");
            grid[key] = values.get<std::vector<double>>();
        }
        try {
            std::vector<SweepRow> rows = crossover_sweep(params, grid);
            write_text_file(join(out_dir, "crossover.csv"), crossover_csv(rows));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config error: field 'grid': ") + e.what());
        }
    }
    std::cout << "classical_iteration_cost: " << format_double(report.classical_total) << "\n"
              << "quantum_iteration_cost: " << format_double(report.quantum_total) << "\n"
              << "speedup: " << format_double(report.speedup) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"apprenticeship learning on tabular MDPs"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    bool timed_csv = false;

    CLI::App* run = app.add_subcommand("run", "run the learning loop from a config");
    CLI::App* diag = app.add_subcommand("diag", "ideal-mode run with contraction diagnostics");
    CLI::App* sweep = app.add_subcommand("sweep", "grid of runs over epsilon/eps_rl/k");
    CLI::App* cost = app.add_subcommand("cost", "analytical classical vs quantum cost model");
    for (CLI::App* sub : {run, diag, sweep})
        sub->add_option("--config", config_path, "path to the JSON config")->required();
    cost->add_option("--params,--config", config_path, "path to the JSON parameter file")
        ->required();
    for (CLI::App* sub : {run, diag, sweep, cost})
        sub->add_option("--out", out_dir, "output directory (default ./out)");
    for (CLI::App* sub : {run, diag})
        sub->add_flag("--timed-csv", timed_csv,
                      "write measured wallclock into iterations.csv (breaks byte determinism)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitBadConfig;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, out_dir, timed_csv);
        if (diag->parsed()) return cmd_diag(config_path, out_dir, timed_csv);
        if (sweep->parsed()) return cmd_sweep(config_path, out_dir);
        return cmd_cost(config_path, out_dir);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitBadConfig;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitBadConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadConfig;
    }
}
