#include "apprentice/feature_expectation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <thread>

#include <Eigen/Dense>

namespace apprentice {

int truncation_horizon(double epsilon, double gamma) {
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw std::invalid_argument("truncation_horizon: epsilon must be in (0,1]");
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw std::invalid_argument("truncation_horizon: gamma must be in [0,1)");
    if (gamma == 0.0) return 0;
    double target = epsilon * (1.0 - gamma) / 2.0;
    double x = std::log(target) / std::log(gamma);  // log_gamma(target)
    int h = static_cast<int>(std::ceil(x - 1.0 - 1e-12));
    if (h < 0) h = 0;
    while (std::pow(gamma, h + 1) / (1.0 - gamma) > epsilon / 2.0) ++h;
    return h;
}

namespace {

Eigen::MatrixXd state_expectation_matrix(const Mdp& mdp, const FeatureMap& features,
                                         const Policy& policy) {
    const int S = mdp.num_states;
    const int A = mdp.num_actions;
    const int k = features.k;
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(S, S);
    Eigen::MatrixXd Psi = Eigen::MatrixXd::Zero(S, k);
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
            double pa = policy.prob(s, a);
            if (pa == 0.0) continue;
            const double* row = mdp.row(s, a);
            for (int s2 = 0; s2 < S; ++s2) P(s, s2) += pa * row[s2];
            const double* f = features.at(s, a);
            for (int c = 0; c < k; ++c) Psi(s, c) += pa * f[c];
        }
    }
    Eigen::MatrixXd A_sys = Eigen::MatrixXd::Identity(S, S) - mdp.discount * P;
    Eigen::MatrixXd M = A_sys.partialPivLu().solve(Psi);
    double residual = (A_sys * M - Psi).cwiseAbs().maxCoeff();
    if (residual > 1e-8)
        throw std::runtime_error("exact_feature_expectation: solve residual " +
                                 std::to_string(residual));
    return M;
}

}  // namespace

std::vector<std::vector<double>> exact_feature_expectation_by_state(const Mdp& mdp,
                                                                    const FeatureMap& features,
                                                                    const Policy& policy) {
    Eigen::MatrixXd M = state_expectation_matrix(mdp, features, policy);
    std::vector<std::vector<double>> out(mdp.num_states, std::vector<double>(features.k));
    for (int s = 0; s < mdp.num_states; ++s)
        for (int c = 0; c < features.k; ++c) out[s][c] = M(s, c);
    return out;
}

FeatureExpectation exact_feature_expectation(const Mdp& mdp, const FeatureMap& features,
                                             const Policy& policy) {
    Eigen::MatrixXd M = state_expectation_matrix(mdp, features, policy);
    FeatureExpectation out;
    out.vec.assign(features.k, 0.0);
    for (int s = 0; s < mdp.num_states; ++s) {
        double d = mdp.start_dist[s];
        if (d == 0.0) continue;
        for (int c = 0; c < features.k; ++c) out.vec[c] += d * M(s, c);
    }
    out.method = FeatureExpectation::Method::Exact;
    return out;
}

FeatureExpectation exact_feature_expectation(const Mdp& mdp, const FeatureMap& features,
                                             const MixedPolicy& policy) {
    policy.validate();
    FeatureExpectation out;
    out.vec.assign(features.k, 0.0);
    for (std::size_t j = 0; j < policy.components.size(); ++j) {
        if (policy.weights[j] == 0.0) continue;
        FeatureExpectation part = exact_feature_expectation(mdp, features, policy.components[j]);
        for (int c = 0; c < features.k; ++c) out.vec[c] += policy.weights[j] * part.vec[c];
    }
    return out;
}

std::int64_t mc_sample_count(int k, double gamma, double epsilon, double delta) {
    if (k < 1) throw std::invalid_argument("mc_sample_count: k must be >= 1");
    if (!(epsilon > 0.0)) throw std::invalid_argument("mc_sample_count: epsilon must be > 0");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("mc_sample_count: delta must be in (0,1)");
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw std::invalid_argument("mc_sample_count: gamma must be in [0,1)");
    double half = epsilon / 2.0;
    double m = 2.0 * k * std::log(2.0 * k / delta) / ((1.0 - gamma) * (1.0 - gamma) * half * half);
    if (!(m < 9e15)) throw std::invalid_argument("mc_sample_count: required sample count overflows");
    return static_cast<std::int64_t>(std::ceil(m));
}

namespace {

int env_thread_count() {
    if (const char* s = std::getenv("APPRENTICE_THREADS")) {
        int n = std::atoi(s);
        if (n >= 1) return n;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

struct DeterministicAgent {
    const int* actions;
    void begin_episode(RandomStream&) {}
    int act(int s, RandomStream&) const { return actions[s]; }
};

struct StochasticAgent {
    const Policy* policy;
    void begin_episode(RandomStream&) {}
    int act(int s, RandomStream& es) const { return policy->sample_action(s, es); }
};

struct MixtureAgent {
    const MixedPolicy* mixed;
    const Policy* current = nullptr;
    void begin_episode(RandomStream& es) {
        int j = sample_categorical(mixed->weights.data(),
                                   static_cast<int>(mixed->weights.size()), es);
        current = &mixed->components[j];
    }
    int act(int s, RandomStream& es) const { return current->sample_action(s, es); }
};

/// Accumulates discounted feature sums for episodes [begin, end) of the
/// substream family rooted at `root`, in episode order.  Takes the agent by
/// value so concurrent workers never share mutable state.
template <typename Agent>
void accumulate_episodes(const FeatureMap& features, double gamma, const TransitionCdf& cdf,
                         const RandomStream& root, std::int64_t begin, std::int64_t end,
                         int horizon, Agent agent, double* acc) {
    const int k = features.k;
    for (std::int64_t e = begin; e < end; ++e) {
        RandomStream es = root.substream(static_cast<std::uint64_t>(e));
        agent.begin_episode(es);
        int s = cdf.sample_start(es);
        double scale = 1.0;
        for (int t = 0; t <= horizon; ++t) {
            int a = agent.act(s, es);
            const double* f = features.at(s, a);
            for (int c = 0; c < k; ++c) acc[c] += scale * f[c];
            if (t < horizon) s = cdf.sample(s, a, es);
            scale *= gamma;
        }
    }
}

template <typename Agent>
FeatureExpectation mc_estimate(const Mdp& mdp, const FeatureMap& features, double epsilon,
                               double delta, RandomStream& rng, Agent agent) {
    const int k = features.k;
    const int horizon = truncation_horizon(epsilon, mdp.discount);
    const std::int64_t m = mc_sample_count(k, mdp.discount, epsilon, delta);
    const TransitionCdf cdf(mdp);
    const RandomStream root = rng.substream(rng.next_u64());

    const std::int64_t chunk = 4096;
    const std::int64_t num_chunks = (m + chunk - 1) / chunk;
    std::vector<double> partials(static_cast<std::size_t>(num_chunks) * k, 0.0);

    auto run_chunks = [&](std::int64_t first, std::int64_t stride) {
        for (std::int64_t c = first; c < num_chunks; c += stride) {
            std::int64_t b = c * chunk;
            std::int64_t e = std::min(m, b + chunk);
            accumulate_episodes(features, mdp.discount, cdf, root, b, e, horizon, agent,
                                partials.data() + static_cast<std::size_t>(c) * k);
        }
    };

    int threads = static_cast<int>(std::min<std::int64_t>(env_thread_count(), num_chunks));
    if (threads <= 1) {
        run_chunks(0, 1);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int w = 0; w < threads; ++w) pool.emplace_back(run_chunks, w, threads);
        for (std::thread& t : pool) t.join();
    }

    FeatureExpectation out;
    out.vec.assign(k, 0.0);
    for (std::int64_t c = 0; c < num_chunks; ++c) {
        const double* p = partials.data() + static_cast<std::size_t>(c) * k;
        for (int i = 0; i < k; ++i) out.vec[i] += p[i];
    }
    for (int i = 0; i < k; ++i) out.vec[i] /= static_cast<double>(m);
    out.accuracy = epsilon;
    out.confidence = 1.0 - delta;
    out.method = FeatureExpectation::Method::MonteCarlo;
    out.episodes = m;
    out.horizon = horizon;
    return out;
}

}  // namespace

FeatureExpectation mc_feature_expectation(const Mdp& mdp, const FeatureMap& features,
                                          const Policy& policy, double epsilon, double delta,
                                          RandomStream& rng) {
    policy.validate();
    if (policy.kind == Policy::Kind::Deterministic)
        return mc_estimate(mdp, features, epsilon, delta, rng,
                           DeterministicAgent{policy.action.data()});
    return mc_estimate(mdp, features, epsilon, delta, rng, StochasticAgent{&policy});
}

FeatureExpectation mc_feature_expectation(const Mdp& mdp, const FeatureMap& features,
                                          const MixedPolicy& policy, double epsilon, double delta,
                                          RandomStream& rng) {
    policy.validate();
    return mc_estimate(mdp, features, epsilon, delta, rng, MixtureAgent{&policy, nullptr});
}

FeatureExpectation expert_estimate(const std::vector<Trajectory>& demos,
                                   const FeatureMap& features, double gamma) {
    if (demos.empty()) throw std::invalid_argument("expert_estimate: no demonstrations");
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw std::invalid_argument("expert_estimate: gamma must be in [0,1)");
    const int k = features.k;
    FeatureExpectation out;
    out.vec.assign(k, 0.0);
    for (const Trajectory& traj : demos) {
        if (traj.empty()) throw std::invalid_argument("expert_estimate: empty trajectory");
        double scale = 1.0;
        for (const Step& st : traj) {
            const double* f = features.at(st.state, st.action);
            for (int c = 0; c < k; ++c) out.vec[c] += scale * f[c];
            scale *= gamma;
        }
    }
    for (int c = 0; c < k; ++c) out.vec[c] /= static_cast<double>(demos.size());
    out.accuracy = std::numeric_limits<double>::quiet_NaN();
    out.confidence = 0.0;
    out.method = FeatureExpectation::Method::Demos;
    out.episodes = static_cast<std::int64_t>(demos.size());
    return out;
}

}  // namespace apprentice
