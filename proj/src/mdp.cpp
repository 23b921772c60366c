#include "apprentice/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace apprentice {

namespace {

void check(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

void check_distribution(const double* p, int n, double tol, const std::string& what) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        check(p[i] >= 0.0, what + ": negative probability");
        sum += p[i];
    }
    check(std::abs(sum - 1.0) <= tol, what + ": row sums to " + std::to_string(sum));
}

}  // namespace

void Mdp::validate() const {
    check(num_states >= 1, "mdp: num_states must be >= 1");
    check(num_actions >= 1, "mdp: num_actions must be >= 1");
    check(discount >= 0.0 && discount < 1.0, "mdp: discount must be in [0,1)");
    check(transition.size() == static_cast<std::size_t>(num_states) * num_actions * num_states,
          "mdp: transition size mismatch");
    check(start_dist.size() == static_cast<std::size_t>(num_states),
          "mdp: start_dist size mismatch");
    for (int s = 0; s < num_states; ++s)
        for (int a = 0; a < num_actions; ++a)
            check_distribution(row(s, a), num_states, 1e-9,
                               "mdp: transition(" + std::to_string(s) + "," + std::to_string(a) + ")");
    check_distribution(start_dist.data(), num_states, 1e-9, "mdp: start_dist");
}

void FeatureMap::validate() const {
    check(num_states >= 1 && num_actions >= 1 && k >= 1, "features: empty dimensions");
    check(phi.size() == static_cast<std::size_t>(num_states) * num_actions * k,
          "features: table size mismatch");
    for (int s = 0; s < num_states; ++s) {
        for (int a = 0; a < num_actions; ++a) {
            const double* f = at(s, a);
            double norm2 = 0.0;
            for (int c = 0; c < k; ++c) {
                check(f[c] >= 0.0 && f[c] <= 1.0, "features: entry outside [0,1]");
                norm2 += f[c] * f[c];
            }
            check(norm2 <= 1.0 + 1e-9, "features: row 2-norm exceeds 1");
        }
    }
}

Policy Policy::make_deterministic(std::vector<int> actions, int num_actions) {
    Policy p;
    p.kind = Kind::Deterministic;
    p.num_states = static_cast<int>(actions.size());
    p.num_actions = num_actions;
    p.action = std::move(actions);
    p.validate();
    return p;
}

Policy Policy::make_stochastic(int num_states, int num_actions, std::vector<double> probs) {
    Policy p;
    p.kind = Kind::Stochastic;
    p.num_states = num_states;
    p.num_actions = num_actions;
    p.probs = std::move(probs);
    p.validate();
    return p;
}

Policy Policy::uniform(int num_states, int num_actions) {
    return make_stochastic(num_states, num_actions,
                           std::vector<double>(static_cast<std::size_t>(num_states) * num_actions,
                                               1.0 / num_actions));
}

double Policy::prob(int s, int a) const {
    if (kind == Kind::Deterministic) return action[s] == a ? 1.0 : 0.0;
    return probs[static_cast<std::size_t>(s) * num_actions + a];
}

int Policy::sample_action(int s, RandomStream& rng) const {
    if (kind == Kind::Deterministic) return action[s];
    return sample_categorical(probs.data() + static_cast<std::size_t>(s) * num_actions,
                              num_actions, rng);
}

void Policy::validate() const {
    check(num_states >= 1 && num_actions >= 1, "policy: empty dimensions");
    if (kind == Kind::Deterministic) {
        check(action.size() == static_cast<std::size_t>(num_states), "policy: action size mismatch");
        for (int a : action) check(a >= 0 && a < num_actions, "policy: action out of range");
    } else {
        check(probs.size() == static_cast<std::size_t>(num_states) * num_actions,
              "policy: probs size mismatch");
        for (int s = 0; s < num_states; ++s)
            check_distribution(probs.data() + static_cast<std::size_t>(s) * num_actions,
                               num_actions, 1e-9, "policy: row " + std::to_string(s));
    }
}

void MixedPolicy::validate() const {
    check(!components.empty(), "mixed policy: no components");
    check(components.size() == weights.size(), "mixed policy: weight count mismatch");
    double sum = 0.0;
    for (double w : weights) {
        check(w >= 0.0, "mixed policy: negative weight");
        sum += w;
    }
    check(std::abs(sum - 1.0) <= 1e-9, "mixed policy: weights sum to " + std::to_string(sum));
    for (const Policy& c : components) c.validate();
}

int sample_next_state(const Mdp& mdp, int s, int a, RandomStream& rng) {
    return sample_categorical(mdp.row(s, a), mdp.num_states, rng);
}

Trajectory rollout(const Mdp& mdp, const Policy& policy, int horizon, RandomStream& rng) {
    if (horizon < 0) throw std::invalid_argument("rollout: horizon must be >= 0");
    Trajectory traj;
    traj.reserve(horizon + 1);
    int s = sample_categorical(mdp.start_dist.data(), mdp.num_states, rng);
    for (int t = 0; t <= horizon; ++t) {
        int a = policy.sample_action(s, rng);
        traj.push_back({s, a});
        if (t < horizon) s = sample_next_state(mdp, s, a, rng);
    }
    return traj;
}

Trajectory rollout(const Mdp& mdp, const MixedPolicy& policy, int horizon, RandomStream& rng) {
    int j = sample_categorical(policy.weights.data(),
                               static_cast<int>(policy.weights.size()), rng);
    return rollout(mdp, policy.components[j], horizon, rng);
}

Mdp build_empirical_mdp(const Mdp& mdp, std::int64_t samples_per_pair, RandomStream& rng) {
    if (samples_per_pair < 1)
        throw std::invalid_argument("build_empirical_mdp: samples_per_pair must be >= 1");
    Mdp out;
    out.num_states = mdp.num_states;
    out.num_actions = mdp.num_actions;
    out.discount = mdp.discount;
    out.start_dist = mdp.start_dist;
    out.transition.assign(mdp.transition.size(), 0.0);
    std::vector<std::int64_t> counts(mdp.num_states);
    for (int s = 0; s < mdp.num_states; ++s) {
        for (int a = 0; a < mdp.num_actions; ++a) {
            std::fill(counts.begin(), counts.end(), 0);
            for (std::int64_t i = 0; i < samples_per_pair; ++i)
                ++counts[sample_next_state(mdp, s, a, rng)];
            double* r = out.row(s, a);
            int last = 0;
            for (int s2 = 0; s2 < mdp.num_states; ++s2) {
                r[s2] = static_cast<double>(counts[s2]) / static_cast<double>(samples_per_pair);
                if (counts[s2] > 0) last = s2;
            }
            // absorb the division rounding into the last supported entry:
            // everything after it is zero, so the accumulated row sum is
            // prefix + r[last], which this makes exactly 1.0
            double prefix = 0.0;
            for (int s2 = 0; s2 < last; ++s2) prefix += r[s2];
            r[last] = 1.0 - prefix;
        }
    }
    return out;
}

RewardTable linear_reward(const FeatureMap& features, const std::vector<double>& w) {
    if (w.size() != static_cast<std::size_t>(features.k))
        throw std::invalid_argument("linear_reward: weight dimension mismatch");
    RewardTable out;
    out.num_states = features.num_states;
    out.num_actions = features.num_actions;
    out.r.resize(static_cast<std::size_t>(features.num_states) * features.num_actions);
    for (int s = 0; s < features.num_states; ++s) {
        for (int a = 0; a < features.num_actions; ++a) {
            const double* f = features.at(s, a);
            double dot = 0.0;
            for (int c = 0; c < features.k; ++c) dot += f[c] * w[c];
            out.r[static_cast<std::size_t>(s) * features.num_actions + a] = dot;
        }
    }
    return out;
}

TransitionCdf::TransitionCdf(const Mdp& mdp)
    : num_states_(mdp.num_states), num_actions_(mdp.num_actions) {
    cdf_.resize(mdp.transition.size());
    for (int s = 0; s < num_states_; ++s) {
        for (int a = 0; a < num_actions_; ++a) {
            const double* p = mdp.row(s, a);
            double* c = cdf_.data() + (static_cast<std::size_t>(s) * num_actions_ + a) * num_states_;
            double acc = 0.0;
            for (int s2 = 0; s2 < num_states_; ++s2) {
                acc += p[s2];
                c[s2] = acc;
            }
            c[num_states_ - 1] = 1.0;
        }
    }
    start_cdf_.resize(num_states_);
    double acc = 0.0;
    for (int s = 0; s < num_states_; ++s) {
        acc += mdp.start_dist[s];
        start_cdf_[s] = acc;
    }
    start_cdf_[num_states_ - 1] = 1.0;
}

int TransitionCdf::sample(int s, int a, RandomStream& rng) const {
    const double* c = cdf_.data() + (static_cast<std::size_t>(s) * num_actions_ + a) * num_states_;
    double u = rng.next_double();
    int lo = 0;
    while (c[lo] <= u) ++lo;
    return lo;
}

int TransitionCdf::sample_start(RandomStream& rng) const {
    double u = rng.next_double();
    int lo = 0;
    while (start_cdf_[lo] <= u) ++lo;
    return lo;
}

namespace {

std::vector<double> renormalized_row(const nlohmann::json& row, int n, const std::string& what) {
    if (!row.is_array() || row.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument(what + ": expected array of length " + std::to_string(n));
    std::vector<double> out(n);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        out[i] = row[i].get<double>();
        if (out[i] < 0.0) throw std::invalid_argument(what + ": negative probability");
        sum += out[i];
    }
    if (std::abs(sum - 1.0) > 1e-6)
        throw std::invalid_argument(what + ": row sums to " + std::to_string(sum));
    for (double& v : out) v /= sum;
    return out;
}

}  // namespace

LoadedMdp parse_mdp_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    LoadedMdp out;
    Mdp& m = out.mdp;
    m.num_states = j.at("num_states").get<int>();
    m.num_actions = j.at("num_actions").get<int>();
    m.discount = j.at("gamma").get<double>();
    if (m.num_states < 1 || m.num_actions < 1)
        throw std::invalid_argument("mdp json: num_states/num_actions must be >= 1");
    if (!(m.discount >= 0.0 && m.discount < 1.0))
        throw std::invalid_argument("mdp json: gamma must be in [0,1)");
    m.start_dist = renormalized_row(j.at("start_dist"), m.num_states, "mdp json: start_dist");
    const nlohmann::json& tr = j.at("transition");
    if (!tr.is_array() || tr.size() != static_cast<std::size_t>(m.num_states))
        throw std::invalid_argument("mdp json: transition must have one entry per state");
    m.transition.resize(static_cast<std::size_t>(m.num_states) * m.num_actions * m.num_states);
    for (int s = 0; s < m.num_states; ++s) {
        const nlohmann::json& per_action = tr[s];
        if (!per_action.is_array() || per_action.size() != static_cast<std::size_t>(m.num_actions))
            throw std::invalid_argument("mdp json: transition[" + std::to_string(s) +
                                        "] must have one row per action");
        for (int a = 0; a < m.num_actions; ++a) {
            std::vector<double> row = renormalized_row(
                per_action[a], m.num_states,
                "mdp json: transition[" + std::to_string(s) + "][" + std::to_string(a) + "]");
            std::copy(row.begin(), row.end(), m.row(s, a));
        }
    }
    m.validate();
    if (j.contains("features")) {
        FeatureMap f;
        f.num_states = m.num_states;
        f.num_actions = m.num_actions;
        const nlohmann::json& ft = j.at("features");
        if (!ft.is_array() || ft.size() != static_cast<std::size_t>(m.num_states))
            throw std::invalid_argument("mdp json: features must have one entry per state");
        f.k = -1;
        for (int s = 0; s < m.num_states; ++s) {
            const nlohmann::json& per_action = ft[s];
            if (!per_action.is_array() || per_action.size() != static_cast<std::size_t>(m.num_actions))
                throw std::invalid_argument("mdp json: features[" + std::to_string(s) +
                                            "] must have one row per action");
            for (int a = 0; a < m.num_actions; ++a) {
                const nlohmann::json& vec = per_action[a];
                if (!vec.is_array() || vec.empty())
                    throw std::invalid_argument("mdp json: feature vector must be a nonempty array");
                if (f.k == -1) {
                    f.k = static_cast<int>(vec.size());
                    f.phi.resize(static_cast<std::size_t>(f.num_states) * f.num_actions * f.k);
                } else if (vec.size() != static_cast<std::size_t>(f.k)) {
                    throw std::invalid_argument("mdp json: inconsistent feature dimension");
                }
                for (int c = 0; c < f.k; ++c) f.at(s, a)[c] = vec[c].get<double>();
            }
        }
        f.validate();
        out.features = std::move(f);
    }
    return out;
}

LoadedMdp load_mdp_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open mdp file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_mdp_json(ss.str());
}

std::string mdp_to_json(const Mdp& mdp, const FeatureMap* features) {
    nlohmann::json j;
    j["num_states"] = mdp.num_states;
    j["num_actions"] = mdp.num_actions;
    j["gamma"] = mdp.discount;
    j["start_dist"] = mdp.start_dist;
    nlohmann::json tr = nlohmann::json::array();
    for (int s = 0; s < mdp.num_states; ++s) {
        nlohmann::json per_action = nlohmann::json::array();
        for (int a = 0; a < mdp.num_actions; ++a)
            per_action.push_back(std::vector<double>(mdp.row(s, a), mdp.row(s, a) + mdp.num_states));
        tr.push_back(std::move(per_action));
    }
    j["transition"] = std::move(tr);
    if (features) {
        nlohmann::json ft = nlohmann::json::array();
        for (int s = 0; s < features->num_states; ++s) {
            nlohmann::json per_action = nlohmann::json::array();
            for (int a = 0; a < features->num_actions; ++a)
                per_action.push_back(
                    std::vector<double>(features->at(s, a), features->at(s, a) + features->k));
            ft.push_back(std::move(per_action));
        }
        j["features"] = std::move(ft);
    }
    return j.dump(2);
}

}  // namespace apprentice
