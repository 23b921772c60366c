#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "apprentice/apprentice.hpp"
#include "apprentice/environments.hpp"
#include "apprentice/feature_expectation.hpp"
#include "apprentice/random.hpp"

#include "oracles.hpp"

using namespace apprentice;

namespace {

// One state, two self-loop actions whose features bracket the target:
// mu(always-0) = 0.4, mu(always-1) = 1.6, uniform start policy mu = 1.0.
BuiltEnv one_state_bracket() {
    BuiltEnv env;
    env.mdp.num_states = 1;
    env.mdp.num_actions = 2;
    env.mdp.discount = 0.5;
    env.mdp.transition = {1.0, 1.0};
    env.mdp.start_dist = {1.0};
    env.features.num_states = 1;
    env.features.num_actions = 2;
    env.features.k = 1;
    env.features.phi = {0.2, 0.8};
    return env;
}

}  // namespace

TEST_CASE("select_best picks the smallest distance, lowest index on ties") {
    CHECK(select_best({0.5}) == 0);
    CHECK(select_best({0.5, 0.2, 0.9}) == 1);
    CHECK(select_best({0.3, 0.3}) == 0);
    CHECK_THROWS_AS(select_best({}), std::invalid_argument);
}

TEST_CASE("mix_policies is linear in exact feature expectations") {
    BuiltEnv env = one_state_bracket();
    Policy p0 = Policy::make_deterministic({0}, 2);
    Policy p1 = Policy::make_deterministic({1}, 2);

    MixedPolicy only_first = mix_policies({p0, p1}, {1.0, 0.0});
    CHECK(exact_feature_expectation(env.mdp, env.features, only_first).vec[0] ==
          doctest::Approx(0.4).epsilon(1e-12));

    MixedPolicy even = mix_policies({p0, p1}, {0.5, 0.5});
    CHECK(exact_feature_expectation(env.mdp, env.features, even).vec[0] ==
          doctest::Approx(1.0).epsilon(1e-12));

    MixedPolicy lone = mix_policies({p1}, {1.0});
    CHECK(exact_feature_expectation(env.mdp, env.features, lone).vec[0] ==
          doctest::Approx(1.6).epsilon(1e-12));
}

TEST_CASE("mix_policies validates the weight simplex") {
    Policy p = Policy::make_deterministic({0}, 2);
    Policy q = Policy::make_deterministic({1}, 2);
    CHECK_THROWS_AS(mix_policies({p, q}, {0.5, 0.6}), std::invalid_argument);
    CHECK_THROWS_AS(mix_policies({p}, {0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(mix_policies({}, {}), std::invalid_argument);
}

TEST_CASE("imitating the initial policy converges immediately") {
    BuiltEnv env = make_gridworld({2, 2, 1, 0.2, 0.9});
    ExpertSpec expert;
    expert.policy = Policy::uniform(4, 4);

    ApprenticeConfig cfg;
    cfg.mode = RunMode::Ideal;
    cfg.epsilon = 0.3;
    cfg.eps_rl = 0.0;

    RunResult res = run_apprenticeship(env.mdp, env.features, expert, cfg);
    CHECK(res.status == RunStatus::Converged);
    CHECK(res.iterations == 1);
    CHECK(res.distances[0] == 0.0);
    CHECK(res.records.size() == 1);
    CHECK(res.records.back().t_margin == 0.0);
}

TEST_CASE("bracketing target is met by the convex mixture of two policies") {
    BuiltEnv env = one_state_bracket();
    ExpertSpec expert;
    expert.mu_vector = std::vector<double>{1.2};

    ApprenticeConfig cfg;
    cfg.mode = RunMode::Ideal;
    cfg.epsilon = 0.05;
    cfg.eps_rl = 0.0;
    cfg.mu_e_in_hull = true;

    RunResult res = run_apprenticeship(env.mdp, env.features, expert, cfg);
    CHECK(res.status == RunStatus::Converged);
    CHECK(res.iterations == 2);
    REQUIRE(res.policies.size() == 2);
    REQUIRE(res.mix_weights.size() == 2);
    CHECK(res.mix_weights[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-3));
    CHECK(res.mix_weights[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-3));

    MixedPolicy mixed = mix_policies(res.policies, res.mix_weights);
    double mu_mixed = exact_feature_expectation(env.mdp, env.features, mixed).vec[0];
    CHECK(std::abs(mu_mixed - 1.2) <= cfg.epsilon / 2.0);
}

TEST_CASE("unreachable target runs out the iteration budget deterministically") {
    BuiltEnv env = make_random_mdp({5, 2, 2, 2, 0.0, 11});
    ExpertSpec expert;
    expert.mu_vector = std::vector<double>{3.0, 3.0};  // far outside the unit-ball hull

    ApprenticeConfig cfg;
    cfg.mode = RunMode::Approximate;
    cfg.epsilon = 0.3;
    cfg.eps_rl = 0.0;
    cfg.delta = 0.25;
    cfg.max_iterations = 3;
    cfg.seed = 9;

    RunResult res = run_apprenticeship(env.mdp, env.features, expert, cfg);
    CHECK(res.status == RunStatus::MaxIterations);
    CHECK(res.iterations == 3);
    CHECK(res.records.size() == 4);  // three productive rounds plus the budget-exhausted row
    CHECK(res.policies.size() == 4);
    CHECK(res.mu_estimates.size() == 4);

    // confidence split: the iteration bound (~71) exceeds the budget, so n_max = 3
    CHECK(res.n_max == 3);
    CHECK(res.delta_split == doctest::Approx(0.25 / 9.0).epsilon(1e-12));

    // history: row 0 is the target, row j+1 the j-th difference vector
    REQUIRE(res.history.size() == res.mu_estimates.size() + 1);
    CHECK(res.history[0] == res.mu_hat_e);
    for (std::size_t j = 0; j < res.mu_estimates.size(); ++j) {
        for (int c = 0; c < 2; ++c)
            CHECK(res.history[j + 1][c] ==
                  doctest::Approx(res.mu_hat_e[c] - res.mu_estimates[j][c]).epsilon(1e-12));
        CHECK(res.distances[j] == doctest::Approx(oracles::norm2(res.history[j + 1])).epsilon(1e-12));
    }

    // sampling totals: every estimate truncates at the same horizon
    int horizon = truncation_horizon(cfg.epsilon / 3.0, env.mdp.discount);
    CHECK(res.total_mc_episodes > 0);
    CHECK(res.total_mc_steps == res.total_mc_episodes * (horizon + 1));

    RunResult again = run_apprenticeship(env.mdp, env.features, expert, cfg);
    CHECK(again.status == res.status);
    CHECK(again.mu_estimates == res.mu_estimates);
    CHECK(again.distances == res.distances);
    CHECK(again.total_mc_episodes == res.total_mc_episodes);
}

TEST_CASE("approximate termination uses the 2-epsilon distance threshold") {
    BuiltEnv env = make_random_mdp({5, 2, 2, 2, 0.0, 11});
    RandomStream rng(21);
    ExpertBundle bundle = make_expert(env.mdp, env.features, {0.7, -0.3}, 1e-9, 0, 0, rng);
    ExpertSpec expert;
    expert.policy = bundle.policy;

    ApprenticeConfig cfg;
    cfg.mode = RunMode::Approximate;
    cfg.epsilon = 1.0;  // threshold 2.0 covers the whole unit-ball hull
    cfg.eps_rl = 0.0;
    cfg.delta = 0.25;
    cfg.seed = 4;

    RunResult res = run_apprenticeship(env.mdp, env.features, expert, cfg);
    CHECK(res.threshold == doctest::Approx(2.0 * cfg.epsilon).epsilon(1e-12));
    CHECK(res.status == RunStatus::Converged);
    CHECK(res.iterations == 1);
    CHECK(res.records.back().dist_min <= res.threshold);
}

TEST_CASE("planning on a rebuilt deterministic kernel changes nothing") {
    BuiltEnv env = make_gridworld({2, 2, 1, 0.0, 0.9});
    RandomStream rng(5);
    ExpertBundle bundle = make_expert(env.mdp, env.features, {0.0, 0.0, 0.0, 1.0}, 1e-9, 0, 0, rng);
    ExpertSpec expert;
    expert.policy = bundle.policy;

    ApprenticeConfig cfg;
    cfg.mode = RunMode::Ideal;
    cfg.epsilon = 0.2;
    cfg.eps_rl = 0.0;
    cfg.max_iterations = 100;

    RunResult plain = run_apprenticeship(env.mdp, env.features, expert, cfg);
    cfg.rl_generative_samples = 100;
    RunResult rebuilt = run_apprenticeship(env.mdp, env.features, expert, cfg);
    CHECK(rebuilt.status == plain.status);
    CHECK(rebuilt.iterations == plain.iterations);
    CHECK(rebuilt.distances == plain.distances);
}

TEST_CASE("epsilon below sqrt(eps_rl) is rejected") {
    BuiltEnv env = one_state_bracket();
    ExpertSpec expert;
    expert.mu_vector = std::vector<double>{1.0};
    ApprenticeConfig cfg;
    cfg.epsilon = 0.1;
    cfg.eps_rl = 0.04;
    CHECK_THROWS_AS(run_apprenticeship(env.mdp, env.features, expert, cfg), std::invalid_argument);
}

TEST_CASE("exactly one demonstrator source is required") {
    BuiltEnv env = one_state_bracket();
    ApprenticeConfig cfg;
    cfg.mode = RunMode::Ideal;
    cfg.eps_rl = 0.0;

    ExpertSpec none;
    CHECK_THROWS_AS(run_apprenticeship(env.mdp, env.features, none, cfg), std::invalid_argument);

    ExpertSpec both;
    both.policy = Policy::uniform(1, 2);
    both.mu_vector = std::vector<double>{1.0};
    CHECK_THROWS_AS(run_apprenticeship(env.mdp, env.features, both, cfg), std::invalid_argument);
}

TEST_CASE("ideal gridworld run respects the contraction and iteration bounds") {
    BuiltEnv env = make_gridworld({4, 4, 2, 0.2, 0.9});
    RandomStream rng(3);
    ExpertBundle bundle =
        make_expert(env.mdp, env.features, {0.6, 0.1, 0.1, 0.2}, 1e-9, 0, 0, rng);
    ExpertSpec expert;
    expert.policy = bundle.policy;

    ApprenticeConfig cfg;
    cfg.mode = RunMode::Ideal;
    cfg.epsilon = 0.3;
    cfg.eps_rl = 1e-6;
    cfg.max_iterations = 2000;
    cfg.seed = 7;

    RunResult res = run_apprenticeship(env.mdp, env.features, expert, cfg);
    CHECK(res.status == RunStatus::Converged);
    CHECK(res.records.back().t_margin <= cfg.epsilon);

    int diagnosed = 0;
    for (const IterationRecord& rec : res.records) {
        if (!rec.hypotheses_hold || !(rec.dist_hull >= cfg.epsilon)) continue;
        ++diagnosed;
        CHECK(rec.bound_ok);
        CHECK(rec.ratio_observed <= rec.ratio_bound + 1e-9);
    }
    CHECK(diagnosed >= 1);

    REQUIRE(res.bound.has_value());
    CHECK(res.iterations <= static_cast<int>(std::ceil(res.bound->iterations)));
}
