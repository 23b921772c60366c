#include "apprentice/rl_solver.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

namespace apprentice {

namespace {

/// One Bellman optimality sweep; returns max |V_next - V| and fills greedy
/// actions (lowest index on ties).
double bellman_sweep(const Mdp& mdp, const RewardTable& reward,
                     const std::vector<double>& v, std::vector<double>& v_next,
                     std::vector<int>* greedy) {
    const int S = mdp.num_states;
    const int A = mdp.num_actions;
    double diff = 0.0;
    for (int s = 0; s < S; ++s) {
        double best = -std::numeric_limits<double>::infinity();
        int best_a = 0;
        for (int a = 0; a < A; ++a) {
            const double* p = mdp.row(s, a);
            double q = 0.0;
            for (int s2 = 0; s2 < S; ++s2) q += p[s2] * v[s2];
            q = reward.at(s, a) + mdp.discount * q;
            if (q > best) {
                best = q;
                best_a = a;
            }
        }
        if (greedy) (*greedy)[s] = best_a;
        diff = std::max(diff, std::abs(best - v[s]));
        v_next[s] = best;
    }
    return diff;
}

Eigen::MatrixXd policy_kernel(const Mdp& mdp, const Policy& policy) {
    const int S = mdp.num_states;
    const int A = mdp.num_actions;
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(S, S);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            double pa = policy.prob(s, a);
            if (pa == 0.0) continue;
            const double* row = mdp.row(s, a);
            for (int s2 = 0; s2 < S; ++s2) P(s, s2) += pa * row[s2];
        }
    return P;
}

}  // namespace

SolveResult solve_eps_optimal(const Mdp& mdp, const RewardTable& reward, double eps_rl) {
    if (eps_rl < 0.0) throw std::invalid_argument("solve_eps_optimal: eps_rl must be >= 0");
    const int S = mdp.num_states;
    const double g = mdp.discount;
    std::vector<double> v(S, 0.0), v_next(S, 0.0);
    std::vector<int> greedy(S, 0);
    SolveResult out;
    if (g == 0.0) {
        bellman_sweep(mdp, reward, v, v_next, &greedy);
        out.sweeps = 1;
    } else {
        double threshold = eps_rl * (1.0 - g) * (1.0 - g) / (2.0 * g * g);
        const int max_sweeps = 2000000;
        int t = 0;
        for (;;) {
            ++t;
            double diff = bellman_sweep(mdp, reward, v, v_next, &greedy);
            if (diff <= threshold) break;
            if (t >= max_sweeps)
                throw std::runtime_error("solve_eps_optimal: sweep cap reached without meeting threshold");
            std::swap(v, v_next);
        }
        out.sweeps = t;
    }
    out.value = v_next;
    out.policy = Policy::make_deterministic(std::move(greedy), mdp.num_actions);
    return out;
}

std::vector<double> policy_value(const Mdp& mdp, const RewardTable& reward, const Policy& policy) {
    const int S = mdp.num_states;
    const int A = mdp.num_actions;
    Eigen::MatrixXd P = policy_kernel(mdp, policy);
    Eigen::VectorXd r(S);
    for (int s = 0; s < S; ++s) {
        double rs = 0.0;
        for (int a = 0; a < A; ++a) rs += policy.prob(s, a) * reward.at(s, a);
        r(s) = rs;
    }
    Eigen::MatrixXd A_sys = Eigen::MatrixXd::Identity(S, S) - mdp.discount * P;
    Eigen::VectorXd v = A_sys.partialPivLu().solve(r);
    double residual = (A_sys * v - r).cwiseAbs().maxCoeff();
    if (residual > 1e-8)
        throw std::runtime_error("policy_value: linear solve residual " + std::to_string(residual));
    return std::vector<double>(v.data(), v.data() + S);
}

PolicyIterationResult exact_policy_iteration(const Mdp& mdp, const RewardTable& reward) {
    const int S = mdp.num_states;
    const int A = mdp.num_actions;
    Policy pi = Policy::make_deterministic(std::vector<int>(S, 0), A);
    PolicyIterationResult out;
    const int max_iters = S * A + 16;
    for (int it = 1; it <= max_iters; ++it) {
        std::vector<double> v = policy_value(mdp, reward, pi);
        bool changed = false;
        for (int s = 0; s < S; ++s) {
            double q_cur = -std::numeric_limits<double>::infinity();
            double best = -std::numeric_limits<double>::infinity();
            int best_a = 0;
            for (int a = 0; a < A; ++a) {
                const double* p = mdp.row(s, a);
                double q = 0.0;
                for (int s2 = 0; s2 < S; ++s2) q += p[s2] * v[s2];
                q = reward.at(s, a) + mdp.discount * q;
                if (a == pi.action[s]) q_cur = q;
                if (q > best) {
                    best = q;
                    best_a = a;
                }
            }
            // switch only on a real improvement so float dust cannot cycle
            if (best > q_cur + 1e-12 && best_a != pi.action[s]) {
                pi.action[s] = best_a;
                changed = true;
            }
        }
        if (!changed) {
            out.policy = pi;
            out.value = std::move(v);
            out.iterations = it;
            return out;
        }
    }
    throw std::runtime_error("exact_policy_iteration: no fixed point within iteration cap");
}

}  // namespace apprentice
