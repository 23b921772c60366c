#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "apprentice/random.hpp"

namespace apprentice {

/**
 * Finite MDP with dense transition kernel.
 *
 * transition is row-major [s][a][s']; every (s,a) row is a probability
 * distribution over next states.  start_dist is the initial state
 * distribution.  discount is in [0, 1).
 */
struct Mdp {
    int num_states = 0;
    int num_actions = 0;
    double discount = 0.0;
    std::vector<double> transition;  // size S*A*S
    std::vector<double> start_dist;  // size S

    const double* row(int s, int a) const {
        return transition.data() + (static_cast<std::size_t>(s) * num_actions + a) * num_states;
    }
    double* row(int s, int a) {
        return transition.data() + (static_cast<std::size_t>(s) * num_actions + a) * num_states;
    }
    double p(int s, int a, int s2) const { return row(s, a)[s2]; }

    /// Throws std::invalid_argument on shape/sign violations or any
    /// transition or start row whose sum is off 1 by more than 1e-9.
    void validate() const;
};

/**
 * Feature table phi(s,a) in R^k.  Entries lie in [0,1] and every (s,a)
 * feature vector has 2-norm at most 1 (small tolerance for rounding).
 */
struct FeatureMap {
    int num_states = 0;
    int num_actions = 0;
    int k = 0;
    std::vector<double> phi;  // size S*A*k

    const double* at(int s, int a) const {
        return phi.data() + (static_cast<std::size_t>(s) * num_actions + a) * k;
    }
    double* at(int s, int a) {
        return phi.data() + (static_cast<std::size_t>(s) * num_actions + a) * k;
    }

    void validate() const;
};

struct RewardTable {
    int num_states = 0;
    int num_actions = 0;
    std::vector<double> r;  // size S*A

    double at(int s, int a) const { return r[static_cast<std::size_t>(s) * num_actions + a]; }
};

/// Markov policy, deterministic (one action per state) or stochastic
/// (probability row per state).
struct Policy {
    enum class Kind { Deterministic, Stochastic };

    Kind kind = Kind::Deterministic;
    int num_states = 0;
    int num_actions = 0;
    std::vector<int> action;    // deterministic: size S
    std::vector<double> probs;  // stochastic: size S*A, rows sum to 1

    static Policy make_deterministic(std::vector<int> actions, int num_actions);
    static Policy make_stochastic(int num_states, int num_actions, std::vector<double> probs);
    static Policy uniform(int num_states, int num_actions);

    double prob(int s, int a) const;
    int sample_action(int s, RandomStream& rng) const;
    void validate() const;
};

/// Mixture over Markov policies: a component is drawn once per episode with
/// the given weights, then followed throughout.
struct MixedPolicy {
    std::vector<Policy> components;
    std::vector<double> weights;  // nonnegative, sum 1

    void validate() const;
};

struct Step {
    int state;
    int action;
};

/// State-action path (s_0,a_0), ..., (s_H,a_H); length = horizon + 1.
using Trajectory = std::vector<Step>;

/// One draw from the transition row at (s,a).
int sample_next_state(const Mdp& mdp, int s, int a, RandomStream& rng);

/// Episode of horizon+1 steps: s_0 ~ start_dist, a_t ~ policy, s_{t+1} ~ kernel.
Trajectory rollout(const Mdp& mdp, const Policy& policy, int horizon, RandomStream& rng);
Trajectory rollout(const Mdp& mdp, const MixedPolicy& policy, int horizon, RandomStream& rng);

/**
 * Maximum-likelihood kernel from a generative model: for every (s,a) draw
 * samples_per_pair next states and set p_hat(s'|s,a) to the count fraction.
 * The last supported entry absorbs the rounding residue so each row sums to
 * exactly 1.0 in floating point.  Copies discount and start_dist unchanged.
 */
Mdp build_empirical_mdp(const Mdp& mdp, std::int64_t samples_per_pair, RandomStream& rng);

/// R(s,a) = w . phi(s,a).  |R| <= ||w||_2 since feature rows have norm <= 1.
RewardTable linear_reward(const FeatureMap& features, const std::vector<double>& w);

/**
 * Cumulative-probability table over next states for fast repeated sampling.
 * Rows are exclusive prefix sums; sampling is a linear scan.  Build once per
 * kernel before tight rollout loops.
 */
class TransitionCdf {
public:
    explicit TransitionCdf(const Mdp& mdp);
    int sample(int s, int a, RandomStream& rng) const;
    int sample_start(RandomStream& rng) const;

private:
    int num_states_;
    int num_actions_;
    std::vector<double> cdf_;        // size S*A*S, inclusive prefix sums
    std::vector<double> start_cdf_;  // size S
};

struct LoadedMdp {
    Mdp mdp;
    std::optional<FeatureMap> features;
};

/**
 * JSON model format: object with num_states, num_actions, gamma, start_dist
 * (length S), transition (S x A rows of length S), and optional features
 * (S x A rows of length k).  Rows whose sum is within 1e-6 of 1 are
 * renormalized; anything further off is rejected.
 */
LoadedMdp load_mdp_json(const std::string& path);
LoadedMdp parse_mdp_json(const std::string& text);
std::string mdp_to_json(const Mdp& mdp, const FeatureMap* features);

}  // namespace apprentice
