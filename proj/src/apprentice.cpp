#include "apprentice/apprentice.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "apprentice/max_margin.hpp"
#include "apprentice/rl_solver.hpp"

namespace apprentice {

namespace {

constexpr double kIdealMarginEps = 2e-5;  // margin solve accuracy in ideal mode
constexpr double kIdealRlEps = 1e-9;      // RL solve accuracy in ideal mode
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

std::vector<double> diff(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

}  // namespace

int select_best(const std::vector<double>& distances) {
    if (distances.empty()) throw std::invalid_argument("select_best: empty distance list");
    int best = 0;
    for (int j = 1; j < static_cast<int>(distances.size()); ++j)
        if (distances[j] < distances[best]) best = j;
    return best;
}

MixedPolicy mix_policies(const std::vector<Policy>& policies, const std::vector<double>& lambda) {
    if (policies.empty()) throw std::invalid_argument("mix_policies: no policies");
    if (policies.size() != lambda.size())
        throw std::invalid_argument("mix_policies: weight count mismatch");
    MixedPolicy mixed;
    mixed.components = policies;
    mixed.weights = lambda;
    mixed.validate();
    return mixed;
}

RunResult run_apprenticeship(const Mdp& mdp, const FeatureMap& features, const ExpertSpec& expert,
                             const ApprenticeConfig& config) {
    mdp.validate();
    features.validate();
    if (features.num_states != mdp.num_states || features.num_actions != mdp.num_actions)
        throw std::invalid_argument("run_apprenticeship: feature table shape mismatch");
    const double eps = config.epsilon;
    const double eps_rl = config.eps_rl;
    if (!(eps > 0.0)) throw std::invalid_argument("epsilon: must be > 0");
    if (!(eps_rl >= 0.0)) throw std::invalid_argument("eps_rl: must be >= 0");
    if (eps < std::sqrt(eps_rl))
        throw std::invalid_argument("epsilon: must satisfy epsilon >= sqrt(eps_rl) (epsilon=" +
                                    std::to_string(eps) + ", sqrt(eps_rl)=" +
                                    std::to_string(std::sqrt(eps_rl)) + ")");
    const bool ideal = config.mode == RunMode::Ideal;
    if (!ideal && !(config.delta > 0.0 && config.delta < 1.0))
        throw std::invalid_argument("delta: must be in (0,1)");
    if (config.max_iterations < 1)
        throw std::invalid_argument("max_iterations: must be >= 1");
    const double rho = config.rho < 0.0 ? eps / 3.0 : config.rho;

    int sources = (expert.policy ? 1 : 0) + (expert.demos.empty() ? 0 : 1) +
                  (expert.mu_vector ? 1 : 0);
    if (sources != 1)
        throw std::invalid_argument("expert: exactly one demonstrator source must be provided");

    const int k = features.k;
    const double gamma = mdp.discount;
    const auto t_start = std::chrono::steady_clock::now();

    RunResult res;
    res.threshold = ideal ? eps : eps + 2.0 * eps / 3.0 + rho;

    // a-priori iteration bound and confidence split
    bool mu_e_in_hull = config.mu_e_in_hull;
    if (eps * eps > eps_rl) res.bound = theorem1_iterations(k, gamma, eps, eps_rl);
    res.n_max = config.max_iterations;
    if (res.bound && res.bound->iterations >= 1.0 &&
        res.bound->iterations < static_cast<double>(config.max_iterations))
        res.n_max = static_cast<int>(std::ceil(res.bound->iterations));
    res.delta_split = config.delta / (3.0 * res.n_max);

    RandomStream rng(config.seed);

    // demonstrator target
    if (expert.policy) {
        res.mu_hat_e = exact_feature_expectation(mdp, features, *expert.policy).vec;
        mu_e_in_hull = true;
    } else if (!expert.demos.empty()) {
        res.mu_hat_e = expert_estimate(expert.demos, features, gamma).vec;
    } else {
        if (expert.mu_vector->size() != static_cast<std::size_t>(k))
            throw std::invalid_argument("expert: mu_vector dimension mismatch");
        res.mu_hat_e = *expert.mu_vector;
    }
    res.mu_e_norm_hypothesis_ok = norm2(res.mu_hat_e) * norm2(res.mu_hat_e) >= 2.0 * eps_rl;
    if (!res.mu_e_norm_hypothesis_ok)
        res.warnings.push_back("||mu_hat_e||^2 < 2*eps_rl: contraction hypotheses void");

    // planning model (optionally an empirical kernel from a generative model)
    Mdp generative_model;
    const Mdp* plan_mdp = &mdp;
    if (config.rl_generative_samples > 0) {
        RandomStream model_rng = rng.substream(0x6d6f64656cull);
        generative_model = build_empirical_mdp(mdp, config.rl_generative_samples, model_rng);
        plan_mdp = &generative_model;
    }

    res.history.push_back(res.mu_hat_e);

    auto estimate_mu = [&](const Policy& pi, std::uint64_t stream_id) {
        if (ideal) return exact_feature_expectation(mdp, features, pi);
        RandomStream sub = rng.substream(stream_id);
        return mc_feature_expectation(mdp, features, pi, eps / 3.0, res.delta_split, sub);
    };
    auto note_estimate = [&](const FeatureExpectation& fe, IterationRecord* rec) {
        if (fe.method != FeatureExpectation::Method::MonteCarlo) return;
        std::int64_t steps = fe.episodes * (fe.horizon + 1);
        res.total_mc_episodes += fe.episodes;
        res.total_mc_steps += steps;
        if (rec) {
            rec->mc_episodes = fe.episodes;
            rec->mc_steps = steps;
        }
    };

    Policy initial = config.initial_policy.value_or(Policy::uniform(mdp.num_states, mdp.num_actions));
    initial.validate();
    res.policies.push_back(initial);
    auto t_phase = std::chrono::steady_clock::now();
    FeatureExpectation mu0 = estimate_mu(initial, 0);
    res.estimate_ms += elapsed_ms(t_phase);
    note_estimate(mu0, nullptr);
    res.mu_estimates.push_back(mu0.vec);
    res.distances.push_back(norm2(diff(res.mu_hat_e, mu0.vec)));
    res.history.push_back(diff(res.mu_hat_e, mu0.vec));

    const double margin_eps = ideal ? kIdealMarginEps : eps / 3.0;
    bool terminated = false;

    for (int i = 1; i <= config.max_iterations + 1; ++i) {
        const auto t_iter = std::chrono::steady_clock::now();
        IterationRecord rec;
        rec.iteration = i;
        rec.dist_new = kNan;
        rec.dist_hull = kNan;
        rec.ratio_observed = kNan;
        rec.ratio_bound = kNan;

        std::vector<std::vector<double>> deltas(res.history.begin() + 1, res.history.end());
        auto t_phase = std::chrono::steady_clock::now();
        MarginSolution margin = solve_max_margin(deltas, margin_eps);
        res.margin_ms += elapsed_ms(t_phase);
        rec.t_margin = margin.t;
        rec.w = margin.w;
        rec.i_min = select_best(res.distances);
        rec.dist_min = res.distances[rec.i_min];

        res.mix_weights = margin.weights;
        res.best_index = rec.i_min;
        res.iterations = i;

        bool converged = ideal ? margin.t <= eps : rec.dist_min <= res.threshold;
        if (converged || margin.t == 0.0) {
            res.status = converged ? RunStatus::Converged : RunStatus::HullReached;
            rec.wallclock_ms = elapsed_ms(t_iter);
            res.records.push_back(std::move(rec));
            terminated = true;
            break;
        }
        if (i > config.max_iterations) {
            res.status = RunStatus::MaxIterations;
            res.iterations = config.max_iterations;
            rec.wallclock_ms = elapsed_ms(t_iter);
            res.records.push_back(std::move(rec));
            break;
        }

        // new policy for the margin direction's linear reward
        RewardTable reward = linear_reward(features, margin.w);
        t_phase = std::chrono::steady_clock::now();
        SolveResult rl = solve_eps_optimal(*plan_mdp, reward, ideal ? kIdealRlEps : eps_rl);
        res.rl_ms += elapsed_ms(t_phase);
        rec.rl_sweeps = rl.sweeps;
        t_phase = std::chrono::steady_clock::now();
        FeatureExpectation mu_i = estimate_mu(rl.policy, static_cast<std::uint64_t>(i));
        res.estimate_ms += elapsed_ms(t_phase);
        note_estimate(mu_i, &rec);

        // contraction diagnostic: hull point from the margin solve's convex
        // coefficients, projected toward the new expectation
        std::vector<double> mu_bar(k, 0.0);
        for (std::size_t j = 0; j < deltas.size(); ++j) {
            if (margin.weights[j] == 0.0) continue;
            for (int c = 0; c < k; ++c)
                mu_bar[c] += margin.weights[j] * res.mu_estimates[j][c];
        }
        double dist_prev = norm2(diff(res.mu_hat_e, mu_bar));
        rec.dist_hull = dist_prev;
        if (dist_prev > 0.0) {
            std::vector<double> mu_tilde =
                projection_update(res.mu_hat_e, mu_bar, mu_i.vec, eps_rl);
            rec.ratio_observed = norm2(diff(res.mu_hat_e, mu_tilde)) / dist_prev;
            rec.hypotheses_hold = ideal && mu_e_in_hull && res.mu_e_norm_hypothesis_ok &&
                                  dist_prev * dist_prev >= 2.0 * eps_rl;
            if (dist_prev * dist_prev >= 2.0 * eps_rl) {
                rec.ratio_bound = lemma1_ratio_bound(k, gamma, eps_rl, dist_prev);
                rec.bound_ok = rec.ratio_observed <= rec.ratio_bound + 1e-9;
            }
        }

        res.policies.push_back(rl.policy);
        res.mu_estimates.push_back(mu_i.vec);
        res.distances.push_back(norm2(diff(res.mu_hat_e, mu_i.vec)));
        res.history.push_back(diff(res.mu_hat_e, mu_i.vec));
        rec.dist_new = res.distances.back();
        rec.wallclock_ms = elapsed_ms(t_iter);
        res.records.push_back(std::move(rec));
    }

    if (!terminated && res.status != RunStatus::MaxIterations)
        res.status = RunStatus::MaxIterations;  // defensive; loop always breaks earlier
    res.total_ms = elapsed_ms(t_start);
    return res;
}

}  // namespace apprentice
