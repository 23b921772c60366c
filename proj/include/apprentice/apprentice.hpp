#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "apprentice/diagnostics.hpp"
#include "apprentice/feature_expectation.hpp"
#include "apprentice/mdp.hpp"

namespace apprentice {

/// Index of the smallest entry, lowest index on ties.
int select_best(const std::vector<double>& distances);

/// Mixture with the given convex weights; validates sizes and the simplex.
MixedPolicy mix_policies(const std::vector<Policy>& policies, const std::vector<double>& lambda);

enum class RunMode {
    Ideal,        // exact feature expectations, near-exact RL, margin termination t <= eps
    Approximate,  // Monte Carlo estimates, eps_rl RL, distance termination at eps + 2eps/3 + rho
};

enum class RunStatus {
    Converged,      // termination test met
    HullReached,    // margin solver returned t = 0: demonstrator inside the achieved hull
    MaxIterations,  // budget exhausted; result carries the partial history
};

struct ApprenticeConfig {
    RunMode mode = RunMode::Approximate;
    double epsilon = 0.3;
    double eps_rl = 0.05;
    double delta = 0.1;           // total failure probability budget (approximate mode)
    double rho = -1.0;            // demonstrator-estimate error allowance; < 0 means epsilon/3
    int max_iterations = 50;
    std::uint64_t seed = 0;
    std::int64_t rl_generative_samples = 0;  // > 0: plan on an empirical kernel rebuilt per run
    std::optional<Policy> initial_policy;    // default uniform
    bool mu_e_in_hull = false;  // caller asserts the demonstrator target lies in the hull
};

/// Demonstrator input: exactly one of the three sources must be provided.
struct ExpertSpec {
    std::optional<Policy> policy;                   // exact target from a known policy
    std::vector<Trajectory> demos;                  // empirical target from demonstrations
    std::optional<std::vector<double>> mu_vector;   // explicit target vector
};

struct IterationRecord {
    int iteration = 0;
    double t_margin = 0.0;  // margin of the direction solve
    double dist_min = 0.0;  // smallest estimated distance so far (termination quantity)
    int i_min = 0;
    std::vector<double> w;   // direction of this iteration
    double dist_new = 0.0;   // distance of the newly generated policy (NaN on the final row)
    std::int64_t mc_episodes = 0;
    std::int64_t mc_steps = 0;
    int rl_sweeps = 0;
    double dist_hull = 0.0;       // ||mu_hat_e - mu_bar|| entering the diagnostic (NaN on final row)
    double ratio_observed = 0.0;  // NaN when no new policy was produced
    double ratio_bound = 0.0;     // NaN when hypotheses fail or no new policy
    bool bound_ok = false;
    bool hypotheses_hold = false;
    double wallclock_ms = 0.0;
};

struct RunResult {
    RunStatus status = RunStatus::Converged;
    int iterations = 0;  // termination iteration n (or max_iterations on budget exhaustion)
    double threshold = 0.0;
    std::vector<double> mu_hat_e;
    std::vector<std::vector<double>> history;  // row 0: mu_hat_e; row j+1: mu_hat_e - mu_j
    std::vector<Policy> policies;              // pi_0 .. pi_last
    std::vector<std::vector<double>> mu_estimates;
    std::vector<double> distances;  // ||mu_hat_e - mu_j||
    int best_index = 0;
    std::vector<double> mix_weights;  // over policies, from the final min-norm point
    std::vector<IterationRecord> records;
    std::vector<std::string> warnings;
    bool mu_e_norm_hypothesis_ok = true;  // ||mu_hat_e||^2 >= 2 eps_rl
    std::optional<IterationBound> bound;  // nullopt when vacuous
    int n_max = 0;                        // confidence-splitting horizon
    double delta_split = 0.0;             // delta / (3 n_max)
    std::int64_t total_mc_episodes = 0;
    std::int64_t total_mc_steps = 0;
    double total_ms = 0.0;
    double margin_ms = 0.0;    // cumulative time in the direction solves
    double rl_ms = 0.0;        // cumulative time in the planner
    double estimate_ms = 0.0;  // cumulative time estimating feature expectations
};

/**
 * Apprenticeship learning against a demonstrator's feature expectations.
 *
 * Each round solves the max-margin direction over the history of difference
 * vectors, checks termination, then generates the next policy by solving the
 * induced linear-reward MDP and estimating its feature expectation.
 * Approximate mode estimates with per-call error epsilon/3 at confidence
 * 1 - delta/(3 n_max) and terminates when the smallest estimated distance
 * falls below epsilon + 2 epsilon/3 + rho; ideal mode uses exact oracles and
 * terminates when the margin itself falls below epsilon.  Requires
 * epsilon >= sqrt(eps_rl).
 */
RunResult run_apprenticeship(const Mdp& mdp, const FeatureMap& features, const ExpertSpec& expert,
                             const ApprenticeConfig& config);

}  // namespace apprentice
