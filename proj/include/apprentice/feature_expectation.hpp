#pragma once

#include <cstdint>
#include <vector>

#include "apprentice/mdp.hpp"

namespace apprentice {

/// Discounted feature expectation with its estimation metadata.
struct FeatureExpectation {
    std::vector<double> vec;  // length k
    double accuracy = 0.0;    // claimed 2-norm error bound (0 = exact, NaN = unstated)
    double confidence = 1.0;  // probability the accuracy claim holds
    enum class Method { Exact, MonteCarlo, Demos } method = Method::Exact;
    std::int64_t episodes = 0;  // MC episodes or demo count
    int horizon = -1;           // truncation horizon used (-1 = none)
};

/**
 * Smallest horizon H with gamma^(H+1)/(1-gamma) <= epsilon/2, computed as
 * ceil(log_gamma(epsilon*(1-gamma)/2) - 1) and then re-verified directly so
 * the guarantee holds regardless of libm rounding.  gamma = 0 returns 0.
 * Requires epsilon in (0,1], gamma in [0,1).
 */
int truncation_horizon(double epsilon, double gamma);

/**
 * Exact discounted feature expectation of a Markov policy: solves the k
 * right-hand-side linear system (I - g P_pi) M = Psi_pi for the per-state
 * expectations and averages rows under the start distribution.  Throws
 * std::runtime_error if the solve residual exceeds 1e-8.
 */
FeatureExpectation exact_feature_expectation(const Mdp& mdp, const FeatureMap& features,
                                             const Policy& policy);

/// Mixture version, by linearity over components.
FeatureExpectation exact_feature_expectation(const Mdp& mdp, const FeatureMap& features,
                                             const MixedPolicy& policy);

/// Per-state expectations mu(pi | s0 = s), rows of the same linear system.
std::vector<std::vector<double>> exact_feature_expectation_by_state(const Mdp& mdp,
                                                                    const FeatureMap& features,
                                                                    const Policy& policy);

/// Hoeffding episode count: ceil(2k ln(2k/delta) / ((1-g)^2 (eps/2)^2));
/// per-coordinate mean over [0, 1/(1-g)] plus a union bound over coordinates.
std::int64_t mc_sample_count(int k, double gamma, double epsilon, double delta);

/**
 * Monte Carlo feature expectation: mc_sample_count(...) episodes truncated at
 * truncation_horizon(epsilon, gamma), so truncation and sampling each spend
 * epsilon/2 and ||estimate - exact||_2 <= epsilon with probability at least
 * 1 - delta.  Episodes use independent substreams indexed by episode number
 * and are reduced in fixed chunk order, so the result depends only on the
 * incoming stream (APPRENTICE_THREADS may parallelize the chunks without
 * changing it).
 */
FeatureExpectation mc_feature_expectation(const Mdp& mdp, const FeatureMap& features,
                                          const Policy& policy, double epsilon, double delta,
                                          RandomStream& rng);
FeatureExpectation mc_feature_expectation(const Mdp& mdp, const FeatureMap& features,
                                          const MixedPolicy& policy, double epsilon, double delta,
                                          RandomStream& rng);

/// Empirical mean of discounted feature sums over demonstration trajectories.
/// Accuracy is unstated (NaN); confidence 0.  Throws on an empty demo set.
FeatureExpectation expert_estimate(const std::vector<Trajectory>& demos,
                                   const FeatureMap& features, double gamma);

}  // namespace apprentice
