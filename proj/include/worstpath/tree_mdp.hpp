#pragma once

#include "worstpath/errors.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace worstpath {

/// Dense state index into a TreeMdp.
enum class StateId : std::uint32_t {};
/// Action index, scoped to the state it is taken in.
enum class ActionId : std::uint32_t {};

constexpr std::size_t index(StateId s) noexcept { return static_cast<std::size_t>(s); }
constexpr std::size_t index(ActionId a) noexcept { return static_cast<std::size_t>(a); }
constexpr StateId state_id(std::size_t i) noexcept { return StateId{static_cast<std::uint32_t>(i)}; }
constexpr ActionId action_id(std::size_t i) noexcept { return ActionId{static_cast<std::uint32_t>(i)}; }

using ChildList = std::vector<StateId>;

/// One invariant violation found by validate(); coordinates are present when meaningful.
struct Violation {
    std::optional<StateId> state;
    std::optional<ActionId> action;
    std::string message;

    std::string describe() const;
};

/**
 * Tree-structured MDP with deterministic branching transitions.
 *
 * Actions at a state are the dense range [0, num_actions(s)). Each action maps
 * to an ordered child list; the order is part of the model and fixes
 * tie-breaking everywhere downstream. Building blocks are terminal and carry
 * reward 1; every other state carries reward 0.
 *
 * The constructor stores whatever it is given so that defective models can be
 * inspected with validate(). Instances are immutable afterwards.
 */
class TreeMdp {
public:
    TreeMdp() = default;
    TreeMdp(double gamma, std::vector<bool> building_block,
            std::vector<std::vector<ChildList>> transitions);

    std::size_t num_states() const noexcept { return building_block_.size(); }
    double gamma() const noexcept { return gamma_; }

    bool is_building_block(StateId s) const;
    std::size_t num_actions(StateId s) const;
    bool is_feasible(StateId s, ActionId a) const;

    /// Stored child list of (s, a) without the feasibility checks of expand().
    std::span<const StateId> children(StateId s, ActionId a) const;

    const std::vector<bool>& building_blocks() const noexcept { return building_block_; }
    const std::vector<std::vector<ChildList>>& transitions() const noexcept { return transitions_; }

    friend bool operator==(const TreeMdp&, const TreeMdp&) = default;

private:
    void check_state(StateId s) const;

    double gamma_ = 0.95;
    std::vector<bool> building_block_;
    std::vector<std::vector<ChildList>> transitions_;
};

/// Root-to-leaf path: states.size() == actions.size() + 1.
struct Path {
    std::vector<StateId> states;
    std::vector<ActionId> actions;
};

/// Binary reward: 1 on building blocks, 0 elsewhere.
double reward(const TreeMdp& mdp, StateId s);

/// Children produced by applying `a` to `s`, in stored order.
std::span<const StateId> expand(const TreeMdp& mdp, StateId s, ActionId a);

std::vector<Violation> validate(const TreeMdp& mdp);

}  // namespace worstpath
