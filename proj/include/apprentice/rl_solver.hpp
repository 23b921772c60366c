#pragma once

#include <vector>

#include "apprentice/mdp.hpp"

namespace apprentice {

struct SolveResult {
    Policy policy;
    std::vector<double> value;  // final value-iteration iterate
    int sweeps = 0;
};

/**
 * Value iteration to an eps_rl-optimal deterministic policy.
 *
 * Sweeps stop once ||V_{t+1} - V_t||_inf <= eps_rl * (1-g)^2 / (2 g^2); the
 * greedy policy pi from V_{t+1} then satisfies V^pi >= V* - eps_rl at every
 * state, via ||V_{t+1} - V*||_inf <= g/(1-g) * ||V_{t+1} - V_t||_inf and the
 * greedy-policy loss bound 2g/(1-g) * ||V - V*||_inf.  gamma = 0 performs a
 * single sweep (the myopic policy is exactly optimal).  Greedy ties break to
 * the lowest action index.
 */
SolveResult solve_eps_optimal(const Mdp& mdp, const RewardTable& reward, double eps_rl);

/// Exact policy evaluation: solves (I - g P_pi) v = r_pi directly and
/// verifies the residual is below 1e-8 (throws std::runtime_error otherwise).
std::vector<double> policy_value(const Mdp& mdp, const RewardTable& reward, const Policy& policy);

struct PolicyIterationResult {
    Policy policy;
    std::vector<double> value;  // exact V*
    int iterations = 0;
};

/// Howard policy iteration with exact evaluation; terminates at a policy
/// greedy with respect to its own value.  Independent of solve_eps_optimal's
/// code path, so it serves as the optimality oracle in tests.
PolicyIterationResult exact_policy_iteration(const Mdp& mdp, const RewardTable& reward);

}  // namespace apprentice
