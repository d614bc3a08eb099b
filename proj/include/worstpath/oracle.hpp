#pragma once

#include "worstpath/policy.hpp"
#include "worstpath/rng.hpp"
#include "worstpath/tree_mdp.hpp"
#include "worstpath/values.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace worstpath::oracle {

inline constexpr std::uint64_t kMaxPolicies = 1'000'000;

/// Mixed-radix enumeration of every state -> feasible action assignment.
/// Building blocks carry a placeholder action 0 that is never used.
class DeterministicPolicyEnumeration {
public:
    explicit DeterministicPolicyEnumeration(const TreeMdp& mdp);

    /// prod_s |feasible(s)|, saturated at UINT64_MAX.
    std::uint64_t count() const noexcept { return count_; }
    const std::vector<ActionId>& current() const noexcept { return choice_; }
    /// Advances to the next assignment; false once every assignment was visited.
    bool next();

private:
    std::vector<std::size_t> radix_;
    std::vector<ActionId> choice_;
    std::uint64_t count_ = 1;
};

/// Worst-path value of a deterministic policy by direct recursion: gamma^height
/// of the realised tree, 0 if the realised expansion revisits a state on the
/// current path or its height exceeds iteration_cap(tol, gamma).
ValueTable deterministic_value(const TreeMdp& mdp, const std::vector<ActionId>& choice,
                               double tol = kDefaultTolerance);

/// Pointwise max of deterministic_value over every deterministic policy.
/// Throws SizeGuardError beyond kMaxPolicies policies.
ValueTable brute_force_v_star(const TreeMdp& mdp, double tol = kDefaultTolerance);

struct MonteCarloEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
};

/// Sample mean of the worst-path return over `n` sampled trees.
MonteCarloEstimate monte_carlo_objective(const TreeMdp& mdp, const StochasticPolicy& pi, StateId root, std::size_t n,
                                         Rng& rng, std::size_t max_steps = 100000);

struct ImprovementReport {
    bool improved = true;
    std::optional<StateId> worst_state;
    /// Largest decrease V_before - V_after over all states (<= 0 when every state improved).
    double worst_drop = 0.0;
};

ImprovementReport check_improvement(const TreeMdp& mdp, const StochasticPolicy& before,
                                    const StochasticPolicy& after, double tol, double eval_tol = 1e-12);

}  // namespace worstpath::oracle
