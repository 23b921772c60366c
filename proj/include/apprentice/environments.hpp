#pragma once

#include <cstdint>
#include <vector>

#include "apprentice/mdp.hpp"

namespace apprentice {

struct BuiltEnv {
    Mdp mdp;
    FeatureMap features;
};

/**
 * Noisy gridworld.  States are cells (x, y) indexed s = y*width + x, actions
 * are N/E/S/W (0..3) with y growing southward; a move goes in the intended
 * direction with probability 1-noise and in each other direction with
 * probability noise/3, and off-grid moves keep the position.  Features are a
 * one-hot macrocell indicator of the current cell (identical across actions),
 * k = (width/macrocell)*(height/macrocell).  Start distribution is a point
 * mass on cell (0,0).
 */
struct GridworldParams {
    int width = 4;
    int height = 4;
    int macrocell = 2;
    double noise = 0.2;
    double discount = 0.9;
};

BuiltEnv make_gridworld(const GridworldParams& params);

/**
 * Random MDP: every (s,a) row is supported on `outdegree` distinct states
 * with flat-Dirichlet weights; features are i.i.d. U[0,1]^k scaled into the
 * unit 2-ball; start distribution is uniform.  Fully determined by seed.
 */
struct RandomMdpParams {
    int num_states = 20;
    int num_actions = 4;
    int k = 6;
    int outdegree = 3;
    double discount = 0.9;
    std::uint64_t seed = 0;
};

BuiltEnv make_random_mdp(const RandomMdpParams& params);

struct ExpertBundle {
    Policy policy;
    std::vector<double> hidden_w;
    std::vector<Trajectory> demos;
    double eps_rl = 0.0;  // optimality slack of the synthesized policy
};

/**
 * Synthesizes a demonstrator: an eps_rl-optimal policy for the hidden linear
 * reward hidden_w (requires ||hidden_w||_1 <= 1), plus num_demos rollouts of
 * horizon+1 steps.  num_demos = 0 yields a bundle with no trajectories.
 */
ExpertBundle make_expert(const Mdp& mdp, const FeatureMap& features,
                         const std::vector<double>& hidden_w, double eps_rl, int num_demos,
                         int horizon, RandomStream& rng);

}  // namespace apprentice
