#include "fixtures.hpp"

#include "worstpath/campaigns.hpp"
#include "worstpath/errors.hpp"
#include "worstpath/oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace worstpath;
using namespace fixtures;

TEST_SUITE("oracle") {

TEST_CASE("enumeration visits every assignment") {
    const auto env = load("example_shortcut.env");
    oracle::DeterministicPolicyEnumeration en(env.mdp);
    CHECK(en.count() == 2);
    std::size_t seen = 1;
    while (en.next()) ++seen;
    CHECK(seen == 2);
}

TEST_CASE("single policy envs reduce to policy evaluation") {
    const auto env = example();
    const auto brute = oracle::brute_force_v_star(env.mdp);
    CHECK(sup_distance(brute, evaluate_policy(env.mdp, StochasticPolicy::from_base(env.base))) <= 1e-12);
    for (StateId s : {C, D, F, H}) CHECK(brute[s] == 1.0);
}

TEST_CASE("shortcut example matches value iteration") {
    const auto env = load("example_shortcut.env");
    const auto brute = oracle::brute_force_v_star(env.mdp);
    CHECK(brute[A] == doctest::Approx(0.95).epsilon(1e-15));
    CHECK(sup_distance(brute, value_iteration(env.mdp)) <= 1e-9);
}

TEST_CASE("deterministic values handle cycles and the depth cutoff") {
    TreeMdp loop(0.9, {false, false, true}, {{{state_id(1)}, {state_id(2)}}, {{state_id(0)}}, {}});
    const auto cyc = oracle::deterministic_value(loop, {a0, a0, a0});
    CHECK(cyc[state_id(0)] == 0.0);
    CHECK(cyc[state_id(1)] == 0.0);
    const auto ok = oracle::deterministic_value(loop, {a1, a0, a0});
    CHECK(ok[state_id(0)] == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(ok[state_id(1)] == doctest::Approx(0.81).epsilon(1e-15));

    const auto chain = linear_chain(0.5);
    CHECK(oracle::deterministic_value(chain.mdp, {a0, a0, a0, a0})[state_id(0)] == 0.125);

    // Cap for tol 0.3 at gamma 0.5 is 2 + 64 levels; a 70-step chain exceeds it.
    std::vector<bool> bb(71, false);
    bb[70] = true;
    std::vector<std::vector<ChildList>> t(71);
    for (std::size_t s = 0; s < 70; ++s) t[s] = {{state_id(s + 1)}};
    TreeMdp long_chain(0.5, bb, t);
    const auto deep = oracle::deterministic_value(long_chain, std::vector<ActionId>(71, a0), 0.3);
    CHECK(deep[state_id(0)] == 0.0);
    CHECK(deep[state_id(10)] > 0.0);
}

TEST_CASE("size guard") {
    EnvConfig cfg;
    cfg.num_states = 200;
    const auto env = generate(cfg);
    CHECK_THROWS_AS(oracle::brute_force_v_star(env.mdp), SizeGuardError);
}

TEST_CASE("monte carlo of a deterministic policy is exact") {
    const auto env = example();
    const auto pi = StochasticPolicy::from_base(env.base);
    Rng rng(0);
    const auto est = oracle::monte_carlo_objective(env.mdp, pi, A, 16, rng);
    CHECK(est.standard_error == 0.0);
    CHECK(est.mean == evaluate_policy(env.mdp, pi)[A]);
}

TEST_CASE("monte carlo of a 50/50 choice") {
    const auto env = five_state();
    // The mid branch realises gamma^2, the dead end 0.
    const double expected = 0.5 * 0.95 * 0.95;
    Rng rng(4);
    const auto est = oracle::monte_carlo_objective(env.mdp, StochasticPolicy::from_base(env.base), state_id(0), 20000, rng);
    CHECK(est.mean >= 0.0);
    CHECK(est.mean <= 1.0);
    CHECK(std::abs(est.mean - expected) <= 4.0 * est.standard_error);
    CHECK(est.standard_error < 0.01);
    CHECK_THROWS_AS(oracle::monte_carlo_objective(env.mdp, StochasticPolicy::from_base(env.base), state_id(0), 0, rng),
                    ConfigError);
}

TEST_CASE("improvement checks") {
    const auto env = benchmark(3, 12);
    const auto pi = StochasticPolicy::from_base(env.base);
    CHECK(oracle::check_improvement(env.mdp, pi, pi, 1e-9).improved);
    const auto v = evaluate_policy(env.mdp, pi, 1e-13);
    const auto next = policy_update_exact(pi, advantage_table(env.mdp, v), 1.0);
    CHECK(oracle::check_improvement(env.mdp, pi, next, 1e-9).improved);
}

TEST_CASE("moving mass to a dead end is caught") {
    const auto env = five_state();
    const auto before = StochasticPolicy::from_base(env.base);
    auto after = before;
    after.probs[0] = {0.0, 1.0};
    const auto rep = oracle::check_improvement(env.mdp, before, after, 1e-9);
    CHECK_FALSE(rep.improved);
    CHECK(rep.worst_state == state_id(0));
    CHECK(rep.worst_drop == doctest::Approx(0.45125).epsilon(1e-9));
}

TEST_CASE("property campaigns at reduced size") {
    CHECK(oracle::contraction_campaign(10, 100).passed());
    CHECK(oracle::fixed_point_campaign(11, 10).passed());
    CHECK(oracle::brute_force_campaign(12, 10).passed());
    CHECK(oracle::improvement_campaign(13, 10).passed());
    CHECK(oracle::rollout_campaign(14, 10).passed());
}

}
