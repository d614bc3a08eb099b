#pragma once

#include "worstpath/harness.hpp"

#include <string>

namespace fixtures {

using namespace worstpath;

inline constexpr StateId A{0}, B{1}, C{2}, D{3}, E{4}, F{5}, G{6}, H{7};
inline constexpr ActionId a0{0}, a1{1}, a2{2};

inline Environment load(const std::string& name) {
    return deserialize(read_file(std::string(WORSTPATH_FIXTURES) + "/" + name));
}

inline Environment example() { return load("example.env"); }

/// Every decomposition applied: A, B, E, G expanded.
inline SynTree example_left(const Environment& env) {
    return explore_greedy(env.mdp, StochasticPolicy::from_base(env.base), A, 50);
}

/// Same choices, stopped after three expansions: G stays unexpanded.
inline SynTree example_right(const Environment& env) {
    return explore_greedy(env.mdp, StochasticPolicy::from_base(env.base), A, 3);
}

/// 0 -a0-> {1}, 0 -a1-> {2}; 1 -a0-> {3}; 2 -a0-> {2}; 3, 4 building blocks.
inline Environment five_state(double gamma = 0.95) {
    TreeMdp mdp(gamma, {false, false, false, true, true}, {{{state_id(1)}, {state_id(2)}}, {{state_id(3)}}, {{state_id(2)}}, {}, {}});
    return {mdp, BasePolicy{{{0.5, 0.5}, {1.0}, {1.0}, {}, {}}}};
}

/// 0 -> 1 -> 2 -> 3 (building block), one action each.
inline Environment linear_chain(double gamma = 0.9) {
    TreeMdp mdp(gamma, {false, false, false, true}, {{{state_id(1)}}, {{state_id(2)}}, {{state_id(3)}}, {}});
    return {mdp, BasePolicy{{{1.0}, {1.0}, {1.0}, {}}}};
}

inline Environment benchmark(std::uint64_t seed, std::size_t states = 500) {
    EnvConfig cfg;
    cfg.num_states = states;
    cfg.seed = seed;
    return generate(cfg);
}

}  // namespace fixtures
