#pragma once

#include "worstpath/policy.hpp"
#include "worstpath/tree_mdp.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace worstpath {

/**
 * Parameters of the synthetic environment generator.
 *
 * Non-building-block states split into "regular" states, ranked so that
 * their default wiring only points at building blocks or lower-ranked regular
 * states (always solvable), and "trap" states whose every action re-enters the
 * trap set (value 0). Dead-end actions are regular actions wired into a trap.
 */
struct EnvConfig {
    std::size_t num_states = 100;
    std::size_t max_actions_per_state = 4;
    /// Weights over child counts 1..K.
    std::vector<double> child_count_weights{0.55, 0.35, 0.10};
    double bb_fraction = 0.3;
    /// Fraction of regular states that receive at least one dead-end action.
    double dead_end_fraction = 0.6;
    /// Share of non-building-block states that are traps (only when dead ends are enabled).
    double trap_fraction = 0.1;
    /// Probability that a regular state's child is a building block.
    double bb_child_prob = 0.45;
    /// Probability that a non-safe regular action also points back up the ranking.
    double back_edge_prob = 0.05;
    /// Fraction of actions hard-masked to zero in the base policy.
    double masked_fraction = 0.15;
    std::uint64_t seed = 0;
    double gamma = 0.95;
};

/// Throws ConfigError on out-of-range fields.
void check_config(const EnvConfig& cfg);

struct Environment {
    TreeMdp mdp;
    BasePolicy base;

    friend bool operator==(const Environment&, const Environment&) = default;
};

/// Pure function of `cfg`. Retries with derived seeds (up to 100 attempts) until
/// at least half of the non-building-block states are solvable.
Environment generate(const EnvConfig& cfg);

/// Line-oriented text format:
///   states <N> gamma <g>
///   bb <ids...>
///   t <s> <a> -> <c1> <c2> ...
///   pi0 <s> <p1> <p2> ...
std::string serialize(const TreeMdp& mdp, const BasePolicy& base);

/// Inverse of serialize(). ParseError for malformed text, ValidationError when
/// the parsed model or base policy violates an invariant.
Environment deserialize(std::string_view doc);

/// Fixed-size whitespace tokenizer shared by the text formats.
std::vector<std::string_view> split_tokens(std::string_view line);

}  // namespace worstpath
