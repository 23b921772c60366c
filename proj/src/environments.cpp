#include "apprentice/environments.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "apprentice/rl_solver.hpp"

namespace apprentice {

BuiltEnv make_gridworld(const GridworldParams& params) {
    const int W = params.width;
    const int H = params.height;
    const int M = params.macrocell;
    if (W < 1 || H < 1) throw std::invalid_argument("gridworld: width/height must be >= 1");
    if (M < 1 || W % M != 0 || H % M != 0)
        throw std::invalid_argument("gridworld: macrocell must divide width and height");
    if (!(params.noise >= 0.0 && params.noise <= 1.0))
        throw std::invalid_argument("gridworld: noise must be in [0,1]");
    if (!(params.discount >= 0.0 && params.discount < 1.0))
        throw std::invalid_argument("gridworld: discount must be in [0,1)");

    const int S = W * H;
    const int A = 4;
    const int cells_x = W / M;
    const int k = cells_x * (H / M);
    static const int dx[4] = {0, 1, 0, -1};  // N, E, S, W
    static const int dy[4] = {-1, 0, 1, 0};

    BuiltEnv env;
    Mdp& mdp = env.mdp;
    mdp.num_states = S;
    mdp.num_actions = A;
    mdp.discount = params.discount;
    mdp.transition.assign(static_cast<std::size_t>(S) * A * S, 0.0);
    mdp.start_dist.assign(S, 0.0);
    mdp.start_dist[0] = 1.0;

    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            int s = y * W + x;
            for (int a = 0; a < A; ++a) {
                double* row = mdp.row(s, a);
                for (int dir = 0; dir < 4; ++dir) {
                    double p = dir == a ? 1.0 - params.noise : params.noise / 3.0;
                    int nx = x + dx[dir];
                    int ny = y + dy[dir];
                    int target = (nx < 0 || nx >= W || ny < 0 || ny >= H) ? s : ny * W + nx;
                    row[target] += p;
                }
            }
        }
    }

    FeatureMap& f = env.features;
    f.num_states = S;
    f.num_actions = A;
    f.k = k;
    f.phi.assign(static_cast<std::size_t>(S) * A * k, 0.0);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            int s = y * W + x;
            int cell = (y / M) * cells_x + (x / M);
            for (int a = 0; a < A; ++a) f.at(s, a)[cell] = 1.0;
        }

    mdp.validate();
    f.validate();
    return env;
}

BuiltEnv make_random_mdp(const RandomMdpParams& params) {
    const int S = params.num_states;
    const int A = params.num_actions;
    const int k = params.k;
    const int d = params.outdegree;
    if (S < 1 || A < 1 || k < 1) throw std::invalid_argument("random mdp: empty dimensions");
    if (d < 1 || d > S) throw std::invalid_argument("random mdp: outdegree must be in [1, S]");
    if (!(params.discount >= 0.0 && params.discount < 1.0))
        throw std::invalid_argument("random mdp: discount must be in [0,1)");

    RandomStream rng(params.seed);
    BuiltEnv env;
    Mdp& mdp = env.mdp;
    mdp.num_states = S;
    mdp.num_actions = A;
    mdp.discount = params.discount;
    mdp.transition.assign(static_cast<std::size_t>(S) * A * S, 0.0);
    mdp.start_dist.assign(S, 1.0 / S);

    std::vector<int> pool(S);
    std::vector<double> weights(d);
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
            std::iota(pool.begin(), pool.end(), 0);
            // partial Fisher-Yates: first d entries become the support
            for (int i = 0; i < d; ++i) {
                int j = i + static_cast<int>(rng.next_index(static_cast<std::uint32_t>(S - i)));
                std::swap(pool[i], pool[j]);
            }
            double total = 0.0;
            for (int i = 0; i < d; ++i) {
                weights[i] = -std::log(1.0 - rng.next_double());  // flat Dirichlet via exponentials
                total += weights[i];
            }
            double* row = mdp.row(s, a);
            for (int i = 0; i < d; ++i) row[pool[i]] = weights[i] / total;
        }
    }

    FeatureMap& f = env.features;
    f.num_states = S;
    f.num_actions = A;
    f.k = k;
    f.phi.resize(static_cast<std::size_t>(S) * A * k);
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
            double* row = f.at(s, a);
            double norm2 = 0.0;
            for (int c = 0; c < k; ++c) {
                row[c] = rng.next_double();
                norm2 += row[c] * row[c];
            }
            if (norm2 > 1.0) {
                double inv = 1.0 / std::sqrt(norm2);
                for (int c = 0; c < k; ++c) row[c] *= inv;
            }
        }
    }

    mdp.validate();
    f.validate();
    return env;
}

ExpertBundle make_expert(const Mdp& mdp, const FeatureMap& features,
                         const std::vector<double>& hidden_w, double eps_rl, int num_demos,
                         int horizon, RandomStream& rng) {
    if (hidden_w.size() != static_cast<std::size_t>(features.k))
        throw std::invalid_argument("make_expert: hidden_w dimension mismatch");
    double l1 = 0.0;
    for (double w : hidden_w) l1 += std::abs(w);
    if (l1 > 1.0 + 1e-9) throw std::invalid_argument("make_expert: ||hidden_w||_1 must be <= 1");
    if (num_demos < 0) throw std::invalid_argument("make_expert: num_demos must be >= 0");
    if (num_demos > 0 && horizon < 0)
        throw std::invalid_argument("make_expert: horizon must be >= 0 when demos are requested");

    ExpertBundle bundle;
    bundle.hidden_w = hidden_w;
    bundle.eps_rl = eps_rl;
    RewardTable reward = linear_reward(features, hidden_w);
    bundle.policy = solve_eps_optimal(mdp, reward, eps_rl).policy;
    bundle.demos.reserve(num_demos);
    for (int i = 0; i < num_demos; ++i)
        bundle.demos.push_back(rollout(mdp, bundle.policy, horizon, rng));
    return bundle;
}

}  // namespace apprentice
