#pragma once

#include "worstpath/rng.hpp"
#include "worstpath/tree_mdp.hpp"

#include <vector>

namespace worstpath {

/// Support-defining prior over feasible actions (the pre-trained single-step model).
struct BasePolicy {
    std::vector<std::vector<double>> probs;

    friend bool operator==(const BasePolicy&, const BasePolicy&) = default;
};

std::vector<Violation> validate(const TreeMdp& mdp, const BasePolicy& base);

/**
 * Per-state distribution over feasible actions plus the support mask it must
 * respect. Building blocks carry empty vectors.
 */
struct StochasticPolicy {
    std::vector<std::vector<double>> probs;
    std::vector<std::vector<bool>> support;

    double prob(StateId s, ActionId a) const { return probs.at(index(s)).at(index(a)); }
    bool in_support(StateId s, ActionId a) const { return support.at(index(s)).at(index(a)); }

    /// Highest-probability action, lowest id on ties.
    ActionId argmax(StateId s) const;
    /// Inverse-CDF draw; never returns a zero-probability action.
    ActionId sample(StateId s, Rng& rng) const;

    /// Starts from `base`; support is the set of strictly positive entries.
    static StochasticPolicy from_base(const BasePolicy& base);
    /// Uniform over all feasible actions, full support.
    static StochasticPolicy uniform(const TreeMdp& mdp);
    /// Probability one on choice[s] at every non-terminal state, full support.
    static StochasticPolicy deterministic(const TreeMdp& mdp, const std::vector<ActionId>& choice);

    friend bool operator==(const StochasticPolicy&, const StochasticPolicy&) = default;
};

/// Shape, normalisation (1e-9) and support checks.
std::vector<Violation> validate(const TreeMdp& mdp, const StochasticPolicy& pi);

}  // namespace worstpath
