#include "apprentice/experiment.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "apprentice/feature_expectation.hpp"
#include "apprentice/rl_solver.hpp"

namespace apprentice {

namespace {

constexpr std::uint64_t kDemoStreamId = 0x64656d6f73ull;    // expert rollouts
constexpr std::uint64_t kExpertStreamId = 0x657870657274ull;  // mixture synthesis

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
    throw ConfigError("config error: field '" + field + "': " + what);
}

const nlohmann::json& require_field(const nlohmann::json& j, const std::string& field) {
    auto it = j.find(field);
    if (it == j.end()) field_error(field, "missing");
    return *it;
}

double require_number(const nlohmann::json& j, const std::string& field) {
    const nlohmann::json& v = require_field(j, field);
    if (!v.is_number()) field_error(field, "must be a number");
    return v.get<double>();
}

double number_or(const nlohmann::json& j, const std::string& field, double def) {
    auto it = j.find(field);
    if (it == j.end()) return def;
    if (!it->is_number()) field_error(field, "must be a number");
    return it->get<double>();
}

int int_or(const nlohmann::json& j, const std::string& field, int def) {
    auto it = j.find(field);
    if (it == j.end()) return def;
    if (!it->is_number_integer()) field_error(field, "must be an integer");
    return it->get<int>();
}

std::string string_or(const nlohmann::json& j, const std::string& field, const std::string& def) {
    auto it = j.find(field);
    if (it == j.end()) return def;
    if (!it->is_string()) field_error(field, "must be a string");
    return it->get<std::string>();
}

std::vector<double> require_vector(const nlohmann::json& j, const std::string& field) {
    const nlohmann::json& v = require_field(j, field);
    if (!v.is_array() || v.empty()) field_error(field, "must be a nonempty array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& x : v) {
        if (!x.is_number()) field_error(field, "must be a nonempty array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

struct BuiltEnvironment {
    Mdp mdp;
    FeatureMap features;
    nlohmann::json echo;
};

BuiltEnvironment build_env(const nlohmann::json& env) {
    if (!env.is_object()) field_error("env", "must be an object");
    std::string kind = string_or(env, "kind", "");
    BuiltEnvironment out;
    if (kind == "gridworld") {
        GridworldParams p;
        p.width = int_or(env, "width", 4);
        p.height = int_or(env, "height", 4);
        p.macrocell = int_or(env, "macrocell", 1);
        p.noise = number_or(env, "noise", 0.2);
        p.discount = number_or(env, "gamma", 0.9);
        try {
            BuiltEnv built = make_gridworld(p);
            out.mdp = std::move(built.mdp);
            out.features = std::move(built.features);
        } catch (const std::invalid_argument& e) {
            field_error("env", e.what());
        }
        out.echo = {{"kind", "gridworld"}, {"width", p.width},       {"height", p.height},
                    {"macrocell", p.macrocell}, {"noise", p.noise},  {"gamma", p.discount}};
    } else if (kind == "random") {
        RandomMdpParams p;
        p.num_states = int_or(env, "num_states", 20);
        p.num_actions = int_or(env, "num_actions", 4);
        p.k = int_or(env, "k", 6);
        p.outdegree = int_or(env, "outdegree", 3);
        p.discount = number_or(env, "gamma", 0.9);
        p.seed = static_cast<std::uint64_t>(number_or(env, "seed", 0));
        try {
            BuiltEnv built = make_random_mdp(p);
            out.mdp = std::move(built.mdp);
            out.features = std::move(built.features);
        } catch (const std::invalid_argument& e) {
            field_error("env", e.what());
        }
        out.echo = {{"kind", "random"},       {"num_states", p.num_states},
                    {"num_actions", p.num_actions}, {"k", p.k},
                    {"outdegree", p.outdegree},     {"gamma", p.discount},
                    {"seed", p.seed}};
    } else if (kind == "file") {
        std::string path = string_or(env, "path", "");
        if (path.empty()) field_error("env.path", "missing");
        LoadedMdp loaded;
        try {
            loaded = load_mdp_json(path);
        } catch (const std::invalid_argument& e) {
            field_error("env.path", e.what());
        } catch (const std::runtime_error& e) {
            throw IoError(e.what());
        }
        if (!loaded.features)
            field_error("env.path", "model file has no feature table");
        out.mdp = std::move(loaded.mdp);
        out.features = std::move(*loaded.features);
        out.echo = {{"kind", "file"}, {"path", path}};
    } else {
        field_error("env.kind", "must be one of gridworld, random, file");
    }
    return out;
}

}  // namespace

ExperimentSetup build_experiment(const nlohmann::json& config) {
    if (!config.is_object()) throw ConfigError("config error: root must be an object");
    ExperimentSetup setup;
    ApprenticeConfig& cfg = setup.config;

    std::string mode = string_or(config, "mode", "approximate");
    if (mode == "approximate") {
        cfg.mode = RunMode::Approximate;
    } else if (mode == "ideal") {
        cfg.mode = RunMode::Ideal;
    } else {
        field_error("mode", "must be 'approximate' or 'ideal'");
    }
    cfg.epsilon = require_number(config, "epsilon");
    if (!(cfg.epsilon > 0.0)) field_error("epsilon", "must be > 0");
    cfg.eps_rl = number_or(config, "eps_rl", 0.0);
    if (!(cfg.eps_rl >= 0.0)) field_error("eps_rl", "must be >= 0");
    if (cfg.epsilon < std::sqrt(cfg.eps_rl))
        field_error("epsilon", "must satisfy epsilon >= sqrt(eps_rl) (epsilon=" +
                                   format_double(cfg.epsilon) + ", sqrt(eps_rl)=" +
                                   format_double(std::sqrt(cfg.eps_rl)) + ")");
    cfg.delta = number_or(config, "delta", 0.1);
    if (cfg.mode == RunMode::Approximate && !(cfg.delta > 0.0 && cfg.delta < 1.0))
        field_error("delta", "must be in (0,1)");
    cfg.rho = number_or(config, "rho", -1.0);
    cfg.max_iterations = int_or(config, "max_iterations", 50);
    if (cfg.max_iterations < 1) field_error("max_iterations", "must be >= 1");
    double seed_num = number_or(config, "seed", 0.0);
    if (seed_num < 0) field_error("seed", "must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(seed_num);
    cfg.rl_generative_samples = static_cast<std::int64_t>(number_or(config, "rl_generative_samples", 0.0));
    if (cfg.rl_generative_samples < 0) field_error("rl_generative_samples", "must be >= 0");

    BuiltEnvironment env = build_env(require_field(config, "env"));
    setup.mdp = std::move(env.mdp);
    setup.features = std::move(env.features);

    const nlohmann::json& expert = require_field(config, "expert");
    if (!expert.is_object()) field_error("expert", "must be an object");
    std::string expert_kind = string_or(expert, "kind", "");
    nlohmann::json expert_echo;
    if (expert_kind == "hidden_w") {
        std::vector<double> w = require_vector(expert, "w");
        if (w.size() != static_cast<std::size_t>(setup.features.k))
            field_error("expert.w", "length must equal the feature dimension k=" +
                                        std::to_string(setup.features.k));
        int demos = int_or(expert, "demos", cfg.mode == RunMode::Approximate ? 2000 : 0);
        if (demos < 0) field_error("expert.demos", "must be >= 0");
        int horizon = int_or(expert, "horizon", -1);
        if (horizon < 0)
            horizon = truncation_horizon(cfg.epsilon / 2.0, setup.mdp.discount);
        double expert_eps_rl = number_or(expert, "eps_rl", 1e-9);
        std::string mu_mode = string_or(config, "mu_e_mode",
                                        cfg.mode == RunMode::Approximate ? "demos" : "exact");
        if (mu_mode != "demos" && mu_mode != "exact")
            field_error("mu_e_mode", "must be 'demos' or 'exact'");
        if (mu_mode == "demos" && demos < 1)
            field_error("expert.demos", "must be >= 1 when mu_e_mode is 'demos'");
        RandomStream demo_rng = RandomStream(cfg.seed).substream(kDemoStreamId);
        ExpertBundle bundle;
        try {
            bundle = make_expert(setup.mdp, setup.features, w, expert_eps_rl,
                                 mu_mode == "demos" ? demos : 0, horizon, demo_rng);
        } catch (const std::invalid_argument& e) {
            field_error("expert", e.what());
        }
        if (mu_mode == "demos") {
            setup.expert.demos = std::move(bundle.demos);
        } else {
            setup.expert.policy = std::move(bundle.policy);
        }
        expert_echo = {{"kind", "hidden_w"}, {"w", w},           {"demos", demos},
                       {"horizon", horizon}, {"eps_rl", expert_eps_rl}, {"mu_e_mode", mu_mode}};
    } else if (expert_kind == "mixture_of_optimal") {
        int components = int_or(expert, "components", 3);
        if (components < 1) field_error("expert.components", "must be >= 1");
        RandomStream root = RandomStream(cfg.seed).substream(kExpertStreamId);
        const int k = setup.features.k;
        std::vector<double> mu(k, 0.0);
        std::vector<double> lambda(components);
        double lambda_sum = 0.0;
        RandomStream lambda_rng = root.substream(0xffffffffull);
        for (int j = 0; j < components; ++j) {
            lambda[j] = -std::log(1.0 - lambda_rng.next_double());
            lambda_sum += lambda[j];
        }
        for (int j = 0; j < components; ++j) {
            RandomStream dir_rng = root.substream(static_cast<std::uint64_t>(j));
            std::vector<double> w(k);
            double l1 = 0.0;
            for (int c = 0; c < k; ++c) {
                w[c] = dir_rng.next_gaussian();
                l1 += std::abs(w[c]);
            }
            for (int c = 0; c < k; ++c) w[c] /= l1;
            RewardTable reward = linear_reward(setup.features, w);
            Policy pi = solve_eps_optimal(setup.mdp, reward, 1e-9).policy;
            FeatureExpectation fe = exact_feature_expectation(setup.mdp, setup.features, pi);
            for (int c = 0; c < k; ++c) mu[c] += lambda[j] / lambda_sum * fe.vec[c];
        }
        setup.expert.mu_vector = std::move(mu);
        cfg.mu_e_in_hull = true;
        expert_echo = {{"kind", "mixture_of_optimal"}, {"components", components}};
    } else if (expert_kind == "mu_vector") {
        std::vector<double> mu = require_vector(expert, "mu");
        if (mu.size() != static_cast<std::size_t>(setup.features.k))
            field_error("expert.mu", "length must equal the feature dimension k=" +
                                         std::to_string(setup.features.k));
        bool in_hull = false;
        if (auto it = expert.find("in_hull"); it != expert.end()) {
            if (!it->is_boolean()) field_error("expert.in_hull", "must be a boolean");
            in_hull = it->get<bool>();
        }
        cfg.mu_e_in_hull = in_hull;
        expert_echo = {{"kind", "mu_vector"}, {"mu", mu}, {"in_hull", in_hull}};
        setup.expert.mu_vector = std::move(mu);
    } else {
        field_error("expert.kind", "must be one of hidden_w, mixture_of_optimal, mu_vector");
    }

    setup.echo = {{"mode", mode},
                  {"epsilon", cfg.epsilon},
                  {"eps_rl", cfg.eps_rl},
                  {"delta", cfg.delta},
                  {"rho", cfg.rho < 0.0 ? cfg.epsilon / 3.0 : cfg.rho},
                  {"max_iterations", cfg.max_iterations},
                  {"seed", cfg.seed},
                  {"rl_generative_samples", cfg.rl_generative_samples},
                  {"env", env.echo},
                  {"expert", expert_echo}};
    return setup;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("cannot read file: " + path);
    try {
        return nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config error: invalid json in " + path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& content) {
    std::filesystem::path p(path);
    std::error_code ec;
    if (p.has_parent_path()) {
        std::filesystem::create_directories(p.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + p.parent_path().string());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << content;
    out.flush();
    if (!out) throw IoError("write failed: " + path);
}

namespace {

nlohmann::json finite_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

const char* status_name(RunStatus status) {
    switch (status) {
        case RunStatus::Converged: return "converged";
        case RunStatus::HullReached: return "hull_reached";
        case RunStatus::MaxIterations: return "max_iterations";
    }
    return "unknown";
}

}  // namespace

nlohmann::json run_result_json(const RunResult& result, const nlohmann::json& echo) {
    nlohmann::json iterations = nlohmann::json::array();
    for (const IterationRecord& rec : result.records) {
        iterations.push_back({{"iter", rec.iteration},
                              {"t_margin", rec.t_margin},
                              {"dist_min", rec.dist_min},
                              {"i_min", rec.i_min},
                              {"w", rec.w},
                              {"dist_new", finite_or_null(rec.dist_new)},
                              {"dist_hull", finite_or_null(rec.dist_hull)},
                              {"mc_episodes", rec.mc_episodes},
                              {"mc_steps", rec.mc_steps},
                              {"rl_sweeps", rec.rl_sweeps},
                              {"ratio_observed", finite_or_null(rec.ratio_observed)},
                              {"ratio_bound", finite_or_null(rec.ratio_bound)},
                              {"bound_ok", rec.bound_ok},
                              {"hypotheses_hold", rec.hypotheses_hold},
                              {"wallclock_ms", rec.wallclock_ms}});
    }
    nlohmann::json bound;
    if (result.bound)
        bound = {{"iterations", result.bound->iterations},
                 {"simplified", result.bound->simplified}};
    else
        bound = "vacuous";
    return {{"version", kVersion},
            {"status", status_name(result.status)},
            {"iterations", result.iterations},
            {"threshold", result.threshold},
            {"mu_hat_e", result.mu_hat_e},
            {"distances", result.distances},
            {"best_index", result.best_index},
            {"mix_weights", result.mix_weights},
            {"bound", bound},
            {"n_max", result.n_max},
            {"delta_split", result.delta_split},
            {"mu_e_norm_hypothesis_ok", result.mu_e_norm_hypothesis_ok},
            {"warnings", result.warnings},
            {"totals",
             {{"mc_episodes", result.total_mc_episodes},
              {"mc_steps", result.total_mc_steps},
              {"wallclock_ms", result.total_ms},
              {"phases",
               {{"margin_ms", result.margin_ms},
                {"rl_ms", result.rl_ms},
                {"estimate_ms", result.estimate_ms}}}}},
            {"iterations_log", iterations},
            {"config", echo}};
}

std::string iterations_csv(const RunResult& result, bool timed) {
    std::string csv = "iter,t_margin,dist_min,ratio_observed,ratio_bound,mc_samples,wallclock_ms\n";
    for (const IterationRecord& rec : result.records) {
        csv += std::to_string(rec.iteration);
        csv += ',';
        csv += format_double(rec.t_margin);
        csv += ',';
        csv += format_double(rec.dist_min);
        csv += ',';
        csv += format_double(rec.ratio_observed);
        csv += ',';
        csv += format_double(rec.ratio_bound);
        csv += ',';
        csv += std::to_string(rec.mc_episodes);
        csv += ',';
        csv += timed ? format_double(rec.wallclock_ms) : "0";
        csv += '\n';
    }
    return csv;
}

std::string diagnostics_csv(const RunResult& result) {
    std::string csv = "iter,dist,ratio_observed,ratio_bound,bound_ok,hypotheses_hold\n";
    for (const IterationRecord& rec : result.records) {
        if (!std::isfinite(rec.dist_hull)) continue;
        csv += std::to_string(rec.iteration);
        csv += ',';
        csv += format_double(rec.dist_hull);
        csv += ',';
        csv += format_double(rec.ratio_observed);
        csv += ',';
        csv += format_double(rec.ratio_bound);
        csv += ',';
        csv += rec.bound_ok ? "1" : "0";
        csv += ',';
        csv += rec.hypotheses_hold ? "1" : "0";
        csv += '\n';
    }
    return csv;
}

namespace {

int gridworld_macrocell_for_k(int width, int height, int k) {
    for (int mc = std::min(width, height); mc >= 1; --mc) {
        if (width % mc != 0 || height % mc != 0) continue;
        if ((width / mc) * (height / mc) == k) return mc;
    }
    field_error("grid.k", "no macrocell decomposition of " + std::to_string(width) + "x" +
                              std::to_string(height) + " yields k=" + std::to_string(k));
}

std::vector<double> grid_values(const nlohmann::json& grid, const std::string& field,
                                double fallback) {
    auto it = grid.find(field);
    if (it == grid.end()) return {fallback};
    return require_vector(grid, field);
}

}  // namespace

std::vector<SweepCell> run_sweep(const nlohmann::json& sweep_config) {
    if (!sweep_config.is_object()) throw ConfigError("config error: root must be an object");
    const nlohmann::json& base = require_field(sweep_config, "base");
    if (!base.is_object()) field_error("base", "must be a run config object");
    nlohmann::json grid = sweep_config.value("grid", nlohmann::json::object());
    if (!grid.is_object()) field_error("grid", "must be an object");
    for (const auto& [key, unused] : grid.items()) {
        (void)unused;
        if (key != "epsilon" && key != "eps_rl" && key != "k")
            field_error("grid." + key, "unknown sweep parameter");
    }

    // defaults from the base config
    ExperimentSetup probe = build_experiment(base);
    std::vector<double> epsilons = grid_values(grid, "epsilon", probe.config.epsilon);
    std::vector<double> eps_rls = grid_values(grid, "eps_rl", probe.config.eps_rl);
    std::vector<double> ks = grid_values(grid, "k", probe.features.k);

    std::vector<SweepCell> cells;
    for (double eps : epsilons) {
        for (double eps_rl : eps_rls) {
            for (double k_value : ks) {
                int k = static_cast<int>(k_value);
                if (k < 1 || static_cast<double>(k) != k_value)
                    field_error("grid.k", "entries must be positive integers");
                nlohmann::json cell_cfg = base;
                cell_cfg["epsilon"] = eps;
                cell_cfg["eps_rl"] = eps_rl;
                nlohmann::json& env = cell_cfg.at("env");
                std::string kind = string_or(env, "kind", "");
                if (kind == "gridworld") {
                    env["macrocell"] = gridworld_macrocell_for_k(int_or(env, "width", 4),
                                                                 int_or(env, "height", 4), k);
                } else if (kind == "random") {
                    env["k"] = k;
                } else if (k != probe.features.k) {
                    field_error("grid.k", "not supported for file environments");
                }
                ExperimentSetup setup = build_experiment(cell_cfg);
                SweepCell cell;
                cell.epsilon = eps;
                cell.eps_rl = eps_rl;
                cell.k = k;
                cell.result = run_apprenticeship(setup.mdp, setup.features, setup.expert,
                                                 setup.config);
                cells.push_back(std::move(cell));
            }
        }
    }
    return cells;
}

std::string sweep_csv(const std::vector<SweepCell>& cells) {
    std::string csv =
        "epsilon,eps_rl,k,status,iterations,dist_min,bound_iterations,bound_simplified\n";
    for (const SweepCell& cell : cells) {
        const RunResult& r = cell.result;
        csv += format_double(cell.epsilon);
        csv += ',';
        csv += format_double(cell.eps_rl);
        csv += ',';
        csv += std::to_string(cell.k);
        csv += ',';
        csv += status_name(r.status);
        csv += ',';
        csv += std::to_string(r.iterations);
        csv += ',';
        csv += format_double(r.records.empty() ? std::numeric_limits<double>::quiet_NaN()
                                               : r.records.back().dist_min);
        csv += ',';
        csv += r.bound ? format_double(r.bound->iterations) : "vacuous";
        csv += ',';
        csv += r.bound ? format_double(r.bound->simplified) : "vacuous";
        csv += '\n';
    }
    return csv;
}

CostParams parse_cost_params(const nlohmann::json& params) {
    if (!params.is_object()) field_error("params", "must be an object");
    CostParams p;
    p.k = require_number(params, "k");
    p.S = require_number(params, "S");
    p.A = require_number(params, "A");
    p.gamma = require_number(params, "gamma");
    p.epsilon = require_number(params, "epsilon");
    p.eps_rl = number_or(params, "eps_rl", 0.0);
    p.n = number_or(params, "n", -1.0);
    try {
        classical_iteration_cost(p);
    } catch (const std::invalid_argument& e) {
        field_error("params", e.what());
    }
    return p;
}

nlohmann::json cost_report_json(const CostReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const SubroutineCost& row : report.rows)
        rows.push_back({{"name", row.name},
                        {"classical", row.classical},
                        {"quantum", row.quantum},
                        {"ratio", row.ratio}});
    return {{"params",
             {{"k", report.params.k},
              {"S", report.params.S},
              {"A", report.params.A},
              {"gamma", report.params.gamma},
              {"epsilon", report.params.epsilon},
              {"eps_rl", report.params.eps_rl},
              {"n", resolved_margin_set_size(report.params)}}},
            {"subroutines", rows},
            {"classical_iteration_cost", report.classical_total},
            {"quantum_iteration_cost", report.quantum_total},
            {"speedup", report.speedup},
            {"note", report.note}};
}

std::string subroutine_csv(const CostReport& report) {
    std::string csv = "subroutine,classical,quantum,ratio\n";
    csv += "iteration_total,";
    csv += format_double(report.classical_total);
    csv += ',';
    csv += format_double(report.quantum_total);
    csv += ',';
    csv += format_double(report.classical_total / report.quantum_total);
    csv += '\n';
    for (const SubroutineCost& row : report.rows) {
        csv += row.name;
        csv += ',';
        csv += format_double(row.classical);
        csv += ',';
        csv += format_double(row.quantum);
        csv += ',';
        csv += format_double(row.ratio);
        csv += '\n';
    }
    return csv;
}

std::string crossover_csv(const std::vector<SweepRow>& rows) {
    std::string csv = "k,S,A,gamma,epsilon,eps_rl,n,classical_cost,quantum_cost,ratio,quantum_wins\n";
    for (const SweepRow& row : rows) {
        const CostParams& p = row.params;
        csv += format_double(p.k);
        csv += ',';
        csv += format_double(p.S);
        csv += ',';
        csv += format_double(p.A);
        csv += ',';
        csv += format_double(p.gamma);
        csv += ',';
        csv += format_double(p.epsilon);
        csv += ',';
        csv += format_double(p.eps_rl);
        csv += ',';
        csv += format_double(resolved_margin_set_size(p));
        csv += ',';
        csv += format_double(row.classical);
        csv += ',';
        csv += format_double(row.quantum);
        csv += ',';
        csv += format_double(row.ratio);
        csv += ',';
        csv += row.quantum_wins ? "1" : "0";
        csv += '\n';
    }
    return csv;
}

}  // namespace apprentice
