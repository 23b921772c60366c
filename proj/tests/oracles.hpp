// Independent reference implementations used only by tests.  Everything here
// is written against the definitions, not against the library code paths it
// checks: feature expectations by finite-horizon dynamic programming, the
// margin problem by exact subset enumeration plus a direction-grid search,
// and Bellman-residual certification of value functions.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "apprentice/mdp.hpp"
#include "apprentice/random.hpp"

namespace oracles {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

inline std::vector<double> sub(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

/**
 * Finite-horizon feature expectation sum_{t=0}^{H} gamma^t E[phi(s_t, a_t)]
 * by backward dynamic programming over per-state vectors.
 */
inline std::vector<double> finite_horizon_mu(const apprentice::Mdp& mdp,
                                             const apprentice::FeatureMap& features,
                                             const apprentice::Policy& policy, int horizon) {
    const int S = mdp.num_states, A = mdp.num_actions, k = features.k;
    // v[s][c]: expected remaining discounted feature sum starting at s
    std::vector<std::vector<double>> v(S, std::vector<double>(k, 0.0));
    for (int h = 0; h <= horizon; ++h) {
        std::vector<std::vector<double>> next(S, std::vector<double>(k, 0.0));
        for (int s = 0; s < S; ++s) {
            for (int a = 0; a < A; ++a) {
                double pa = policy.prob(s, a);
                if (pa == 0.0) continue;
                const double* phi = features.at(s, a);
                const double* row = mdp.row(s, a);
                std::vector<double> future(k, 0.0);
                if (h > 0) {
                    for (int s2 = 0; s2 < S; ++s2) {
                        if (row[s2] == 0.0) continue;
                        for (int c = 0; c < k; ++c) future[c] += row[s2] * v[s2][c];
                    }
                }
                for (int c = 0; c < k; ++c)
                    next[s][c] += pa * (phi[c] + mdp.discount * future[c]);
            }
        }
        v.swap(next);
    }
    std::vector<double> mu(k, 0.0);
    for (int s = 0; s < S; ++s)
        for (int c = 0; c < k; ++c) mu[c] += mdp.start_dist[s] * v[s][c];
    return mu;
}

struct MinNormOracle {
    std::vector<double> point;    // exact minimum-norm point of the hull
    std::vector<double> weights;  // convex coefficients over the inputs
    double t = 0.0;               // ||point||, the exact margin value
    std::vector<double> w;        // point normalized; zero vector when t == 0
};

/**
 * Exact minimum-norm point by enumeration: the optimum lies in the relative
 * interior of some face, i.e. it is the affine minimizer over a subset of
 * points with convex coefficients, certified by the optimality condition
 * x . p_j >= ||x||^2 for every input point.  Enumerates all non-empty
 * subsets (intended for n <= ~12) and returns the best certified candidate.
 */
inline MinNormOracle min_norm_oracle(const std::vector<std::vector<double>>& points) {
    const int n = static_cast<int>(points.size());
    const int k = static_cast<int>(points[0].size());
    if (n > 20) throw std::invalid_argument("min_norm_oracle: too many points");
    MinNormOracle best;
    double best_norm2 = std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        std::vector<int> idx;
        for (int j = 0; j < n; ++j)
            if (mask & (1u << j)) idx.push_back(j);
        const int m = static_cast<int>(idx.size());
        // minimize ||sum_j lambda_j p_j||^2 subject to sum lambda = 1:
        // KKT system [2G 1; 1^T 0] [lambda; nu] = [0; 1] with Gram matrix G.
        Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m + 1, m + 1);
        for (int a = 0; a < m; ++a) {
            for (int b = 0; b < m; ++b) kkt(a, b) = 2.0 * dot(points[idx[a]], points[idx[b]]);
            kkt(a, m) = 1.0;
            kkt(m, a) = 1.0;
        }
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
        rhs(m) = 1.0;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
        if (!lu.isInvertible()) continue;
        Eigen::VectorXd sol = lu.solve(rhs);
        bool convex = true;
        for (int a = 0; a < m; ++a) convex = convex && sol(a) >= -1e-12;
        if (!convex) continue;
        std::vector<double> x(k, 0.0);
        for (int a = 0; a < m; ++a)
            for (int c = 0; c < k; ++c) x[c] += sol(a) * points[idx[a]][c];
        double xx = dot(x, x);
        // global optimality: x supports the whole hull
        bool optimal = true;
        for (int j = 0; j < n; ++j) optimal = optimal && dot(x, points[j]) >= xx - 1e-9;
        if (!optimal || xx >= best_norm2) continue;
        best_norm2 = xx;
        best.point = x;
        best.weights.assign(n, 0.0);
        for (int a = 0; a < m; ++a) best.weights[idx[a]] = std::max(0.0, sol(a));
        best.t = std::sqrt(xx);
        best.w.assign(k, 0.0);
        if (best.t > 1e-12)
            for (int c = 0; c < k; ++c) best.w[c] = x[c] / best.t;
        else
            best.t = 0.0;
    }
    if (!std::isfinite(best_norm2))
        throw std::runtime_error("min_norm_oracle: no certified candidate");
    return best;
}

/**
 * Direction-grid lower bound on max_{||w||=1} min_j w . d_j: evaluates the
 * inner minimum over `samples` pseudo-random unit directions (plus the
 * normalized oracle direction of each point).  Never exceeds the true
 * optimum; approaches it as samples grow.
 */
inline double sphere_grid_margin(const std::vector<std::vector<double>>& deltas, int samples,
                                 apprentice::RandomStream& rng) {
    const int k = static_cast<int>(deltas[0].size());
    double best = -std::numeric_limits<double>::infinity();
    auto consider = [&](const std::vector<double>& w) {
        double nw = norm2(w);
        if (nw == 0.0) return;
        double worst = std::numeric_limits<double>::infinity();
        for (const auto& d : deltas) worst = std::min(worst, dot(w, d) / nw);
        best = std::max(best, worst);
    };
    for (const auto& d : deltas) consider(d);
    std::vector<double> w(k);
    for (int i = 0; i < samples; ++i) {
        for (int c = 0; c < k; ++c) w[c] = rng.next_gaussian();
        consider(w);
    }
    return best;
}

/// max_s |V(s) - max_a [R(s,a) + gamma sum_s' p V(s')]|: certifies that V is
/// the optimal value function without trusting any solver internals.
inline double bellman_optimality_residual(const apprentice::Mdp& mdp,
                                          const apprentice::RewardTable& reward,
                                          const std::vector<double>& v) {
    double worst = 0.0;
    for (int s = 0; s < mdp.num_states; ++s) {
        double best = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < mdp.num_actions; ++a) {
            double q = reward.at(s, a);
            const double* row = mdp.row(s, a);
            for (int s2 = 0; s2 < mdp.num_states; ++s2) q += mdp.discount * row[s2] * v[s2];
            best = std::max(best, q);
        }
        worst = std::max(worst, std::abs(v[s] - best));
    }
    return worst;
}

/// Uniformly random point on the unit sphere in R^k.
inline std::vector<double> random_unit(int k, apprentice::RandomStream& rng) {
    std::vector<double> w(k);
    double n = 0.0;
    do {
        for (int c = 0; c < k; ++c) w[c] = rng.next_gaussian();
        n = norm2(w);
    } while (n < 1e-12);
    for (int c = 0; c < k; ++c) w[c] /= n;
    return w;
}

/// Random stochastic policy with Dirichlet-ish rows.
inline apprentice::Policy random_policy(int S, int A, apprentice::RandomStream& rng) {
    std::vector<double> probs(static_cast<std::size_t>(S) * A);
    for (int s = 0; s < S; ++s) {
        double total = 0.0;
        for (int a = 0; a < A; ++a) {
            double e = -std::log(1.0 - rng.next_double());
            probs[static_cast<std::size_t>(s) * A + a] = e;
            total += e;
        }
        for (int a = 0; a < A; ++a) probs[static_cast<std::size_t>(s) * A + a] /= total;
    }
    return apprentice::Policy::make_stochastic(S, A, std::move(probs));
}

}  // namespace oracles
