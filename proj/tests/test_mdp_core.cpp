#include <cmath>
#include <string>
#include <vector>

#include <doctest.h>

#include "apprentice/environments.hpp"
#include "apprentice/mdp.hpp"
#include "apprentice/random.hpp"

#include "oracles.hpp"

using namespace apprentice;

namespace {

// Three-state, one-action kernel with a configurable row at state 0.
Mdp three_state(std::vector<double> row0, double gamma = 0.5) {
    Mdp m;
    m.num_states = 3;
    m.num_actions = 1;
    m.discount = gamma;
    m.start_dist = {1.0, 0.0, 0.0};
    m.transition = {row0[0], row0[1], row0[2],   // s=0
                    0.0, 1.0, 0.0,               // s=1 absorbing
                    0.0, 0.0, 1.0};              // s=2 absorbing
    m.validate();
    return m;
}

Mdp chain012() {
    // deterministic chain 0 -> 1 -> 2, 2 absorbing
    Mdp m;
    m.num_states = 3;
    m.num_actions = 1;
    m.discount = 0.9;
    m.start_dist = {1.0, 0.0, 0.0};
    m.transition = {0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0};
    m.validate();
    return m;
}

}  // namespace

TEST_CASE("sample_next_state: point mass, determinism, frequencies") {
    RandomStream rng(1);
    Mdp pm = three_state({0.0, 0.0, 1.0});
    for (int i = 0; i < 10; ++i) CHECK(sample_next_state(pm, 0, 0, rng) == 2);

    Mdp half = three_state({0.5, 0.5, 0.0});
    RandomStream r1(42), r2(42);
    for (int i = 0; i < 50; ++i)
        CHECK(sample_next_state(half, 0, 0, r1) == sample_next_state(half, 0, 0, r2));

    Mdp biased = three_state({0.3, 0.7, 0.0});
    RandomStream r3(7);
    int count1 = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) count1 += sample_next_state(biased, 0, 0, r3) == 1;
    CHECK(std::abs(count1 / static_cast<double>(n) - 0.7) < 0.01);
}

TEST_CASE("TransitionCdf sampling matches the kernel") {
    Mdp biased = three_state({0.3, 0.7, 0.0});
    TransitionCdf cdf(biased);
    RandomStream rng(7);
    int count1 = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) count1 += cdf.sample(0, 0, rng) == 1;
    CHECK(std::abs(count1 / static_cast<double>(n) - 0.7) < 0.01);

    Mdp pm = three_state({0.0, 0.0, 1.0});
    TransitionCdf pm_cdf(pm);
    RandomStream rng2(3);
    for (int i = 0; i < 10; ++i) CHECK(pm_cdf.sample(0, 0, rng2) == 2);
}

TEST_CASE("build_empirical_mdp: point masses, one-hots, concentration") {
    Mdp pm = chain012();
    RandomStream rng(0);
    Mdp emp = build_empirical_mdp(pm, 5, rng);
    CHECK(emp.transition == pm.transition);  // deterministic kernel preserved exactly

    Mdp half = three_state({0.5, 0.5, 0.0});
    RandomStream rng1(9);
    Mdp one = build_empirical_mdp(half, 1, rng1);
    for (int s = 0; s < 3; ++s) {
        int ones = 0;
        for (int s2 = 0; s2 < 3; ++s2) {
            double p = one.p(s, 0, s2);
            CHECK((p == 0.0 || p == 1.0));
            ones += p == 1.0;
        }
        CHECK(ones == 1);
    }

    Mdp biased = three_state({0.3, 0.7, 0.0});
    RandomStream rng0(0);
    Mdp est = build_empirical_mdp(biased, 10000, rng0);
    CHECK(std::abs(est.p(0, 0, 0) - 0.3) < 0.02);
    CHECK(std::abs(est.p(0, 0, 1) - 0.7) < 0.02);
    est.validate();
}

TEST_CASE("empirical kernel rows sum to exactly 1.0") {
    BuiltEnv env = make_random_mdp({8, 3, 2, 4, 0.9, 17});
    RandomStream rng(23);
    Mdp emp = build_empirical_mdp(env.mdp, 137, rng);
    for (int s = 0; s < emp.num_states; ++s)
        for (int a = 0; a < emp.num_actions; ++a) {
            double sum = 0.0;
            for (int s2 = 0; s2 < emp.num_states; ++s2) sum += emp.p(s, a, s2);
            CHECK(sum == 1.0);
        }
}

TEST_CASE("empirical kernel concentration holds at the stated rate") {
    // l-inf row error <= sqrt(ln(2S/0.01) / (2N)) in at least 99% of trials
    Mdp biased = three_state({0.3, 0.7, 0.0});
    const int N = 1000;
    const double bound = std::sqrt(std::log(2.0 * 3 / 0.01) / (2.0 * N));
    RandomStream root(1234);
    int ok = 0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        RandomStream rng = root.substream(t);
        Mdp est = build_empirical_mdp(biased, N, rng);
        double err = std::max(std::abs(est.p(0, 0, 0) - 0.3), std::abs(est.p(0, 0, 1) - 0.7));
        ok += err <= bound;
    }
    CHECK(ok >= 198);
}

TEST_CASE("rollout shapes, chains, determinism") {
    Mdp single;
    single.num_states = 1;
    single.num_actions = 1;
    single.discount = 0.5;
    single.start_dist = {1.0};
    single.transition = {1.0};
    single.validate();
    Policy only = Policy::make_deterministic({0}, 1);
    RandomStream rng(1);
    Trajectory tr = rollout(single, only, 3, rng);
    REQUIRE(tr.size() == 4);
    for (const Step& st : tr) {
        CHECK(st.state == 0);
        CHECK(st.action == 0);
    }

    Mdp chain = chain012();
    Trajectory path = rollout(chain, Policy::make_deterministic({0, 0, 0}, 1), 2, rng);
    REQUIRE(path.size() == 3);
    CHECK(path[0].state == 0);
    CHECK(path[1].state == 1);
    CHECK(path[2].state == 2);

    BuiltEnv env = make_random_mdp({10, 3, 2, 3, 0.9, 5});
    Policy pi = Policy::uniform(10, 3);
    RandomStream ra(77), rb(77);
    Trajectory ta = rollout(env.mdp, pi, 20, ra);
    Trajectory tb = rollout(env.mdp, pi, 20, rb);
    REQUIRE(ta.size() == tb.size());
    for (std::size_t i = 0; i < ta.size(); ++i) {
        CHECK(ta[i].state == tb[i].state);
        CHECK(ta[i].action == tb[i].action);
    }
}

TEST_CASE("rollout start-state frequencies match the start distribution") {
    Mdp m = three_state({1.0, 0.0, 0.0});
    m.start_dist = {0.2, 0.3, 0.5};
    m.validate();
    Policy pi = Policy::make_deterministic({0, 0, 0}, 1);
    RandomStream rng(31);
    std::vector<int> counts(3, 0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++counts[rollout(m, pi, 0, rng)[0].state];
    CHECK(std::abs(counts[0] / static_cast<double>(n) - 0.2) < 0.01);
    CHECK(std::abs(counts[1] / static_cast<double>(n) - 0.3) < 0.01);
    CHECK(std::abs(counts[2] / static_cast<double>(n) - 0.5) < 0.01);
}

TEST_CASE("linear_reward assembles dot products") {
    FeatureMap f;
    f.num_states = 1;
    f.num_actions = 1;
    f.k = 2;
    f.phi = {0.6, 0.8};
    f.validate();

    RewardTable zero = linear_reward(f, {0.0, 0.0});
    CHECK(zero.at(0, 0) == 0.0);
    RewardTable first = linear_reward(f, {1.0, 0.0});
    CHECK(first.at(0, 0) == doctest::Approx(0.6).epsilon(1e-12));
    RewardTable full = linear_reward(f, {0.6, 0.8});
    CHECK(full.at(0, 0) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(linear_reward(f, {1.0}), std::invalid_argument);
}

TEST_CASE("linear_reward with a unit-ball w stays in [-1, 1]") {
    BuiltEnv env = make_random_mdp({12, 4, 5, 3, 0.9, 3});
    RandomStream rng(8);
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<double> w = oracles::random_unit(5, rng);
        RewardTable r = linear_reward(env.features, w);
        for (int s = 0; s < 12; ++s)
            for (int a = 0; a < 4; ++a) CHECK(std::abs(r.at(s, a)) <= 1.0 + 1e-12);
    }
}

TEST_CASE("validate rejects malformed inputs") {
    Mdp bad = three_state({0.5, 0.5, 0.0});
    bad.transition[0] = 0.6;  // row sums to 1.1
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    Mdp neg = three_state({0.5, 0.5, 0.0});
    neg.transition[0] = -0.5;
    neg.transition[1] = 1.5;
    CHECK_THROWS_AS(neg.validate(), std::invalid_argument);

    Mdp gamma1 = three_state({0.5, 0.5, 0.0});
    gamma1.discount = 1.0;
    CHECK_THROWS_AS(gamma1.validate(), std::invalid_argument);

    CHECK_THROWS_AS(Policy::make_deterministic({0, 0, 5}, 1), std::invalid_argument);
}

TEST_CASE("model JSON round trip preserves tables and renormalizes gently") {
    BuiltEnv env = make_random_mdp({6, 2, 3, 3, 0.8, 11});
    std::string text = mdp_to_json(env.mdp, &env.features);
    LoadedMdp back = parse_mdp_json(text);
    REQUIRE(back.features.has_value());
    CHECK(back.mdp.num_states == 6);
    CHECK(back.mdp.discount == doctest::Approx(0.8).epsilon(1e-12));
    for (std::size_t i = 0; i < env.mdp.transition.size(); ++i)
        CHECK(back.mdp.transition[i] == doctest::Approx(env.mdp.transition[i]).epsilon(1e-12));
    for (std::size_t i = 0; i < env.features.phi.size(); ++i)
        CHECK(back.features->phi[i] == doctest::Approx(env.features.phi[i]).epsilon(1e-12));

    // a row off by 1e-7 is renormalized; off by 1e-3 is rejected
    std::string nearly =
        R"({"num_states":2,"num_actions":1,"gamma":0.5,"start_dist":[1.0,0.0],)"
        R"("transition":[[[0.5,0.5000001]],[[0.0,1.0]]]})";
    LoadedMdp fixed = parse_mdp_json(nearly);
    double sum = fixed.mdp.p(0, 0, 0) + fixed.mdp.p(0, 0, 1);
    CHECK(std::abs(sum - 1.0) <= 1e-12);

    std::string off =
        R"({"num_states":2,"num_actions":1,"gamma":0.5,"start_dist":[1.0,0.0],)"
        R"("transition":[[[0.5,0.501]],[[0.0,1.0]]]})";
    CHECK_THROWS_AS(parse_mdp_json(off), std::invalid_argument);
}

TEST_CASE("mixed policy with weight 1 on a component behaves as that component") {
    Mdp chain = chain012();
    Policy a = Policy::make_deterministic({0, 0, 0}, 1);
    MixedPolicy mix;
    mix.components = {a, a};
    mix.weights = {1.0, 0.0};
    mix.validate();
    RandomStream rng(4);
    Trajectory tr = rollout(chain, mix, 2, rng);
    CHECK(tr[0].state == 0);
    CHECK(tr[1].state == 1);
    CHECK(tr[2].state == 2);
}
