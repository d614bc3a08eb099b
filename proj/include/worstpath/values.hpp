#pragma once

#include "worstpath/policy.hpp"
#include "worstpath/syn_tree.hpp"
#include "worstpath/tree_mdp.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

namespace worstpath {

/// One scalar per state. Tables produced by this module stay in [0,1] with
/// building blocks pinned at 1.
struct ValueTable {
    std::vector<double> values;

    ValueTable() = default;
    explicit ValueTable(std::vector<double> v) : values(std::move(v)) {}
    ValueTable(std::size_t n, double fill) : values(n, fill) {}

    std::size_t size() const noexcept { return values.size(); }
    double operator[](StateId s) const { return values.at(index(s)); }
    double& operator[](StateId s) { return values.at(index(s)); }

    friend bool operator==(const ValueTable&, const ValueTable&) = default;
};

inline constexpr double kDefaultTolerance = 1e-10;

/// The reward vector; the starting point of every iteration below.
ValueTable reward_table(const TreeMdp& mdp);

double sup_distance(const ValueTable& a, const ValueTable& b);

/// Iteration cap for sup-norm tolerance `tol` under discount `gamma`:
/// ceil(log(tol) / log(gamma)) + 64.
std::size_t iteration_cap(double tol, double gamma);

/// gamma^T * r(s_T), T = number of actions. Throws PathError if the path is
/// not consistent with the model.
double path_return(const Path& path, const TreeMdp& mdp);

/// Minimum path return over all root-to-leaf paths below `node`;
/// unexpanded leaves contribute 0.
double tree_worst_path_return(const SynTree& tree, const TreeMdp& mdp, std::size_t node = 0);

/// r(s) + gamma (1 - r(s)) min_{s' in T(s,a)} V(s').
double q_value(const TreeMdp& mdp, const ValueTable& v, StateId s, ActionId a);

double advantage(const TreeMdp& mdp, const ValueTable& v, StateId s, ActionId a);

/// Fixed point of the policy recursion, iterated from the reward vector until
/// the sup-norm change drops below `tol`.
ValueTable evaluate_policy(const TreeMdp& mdp, const StochasticPolicy& pi, double tol = kDefaultTolerance);

/// One Jacobi sweep of the worst-path Bellman optimality operator.
ValueTable bellman_optimal_backup(const TreeMdp& mdp, const ValueTable& v);

ValueTable value_iteration(const TreeMdp& mdp, double tol = kDefaultTolerance);
ValueTable value_iteration(const TreeMdp& mdp, const ValueTable& initial, double tol = kDefaultTolerance);

/// Deterministic argmax_a min_{s'} V(s') per non-terminal state, lowest action
/// id on ties. With `support`, the argmax is restricted to masked-in actions and
/// the mask is carried into the result; without it the result has full support.
StochasticPolicy greedy_policy(const TreeMdp& mdp, const ValueTable& v,
                               const std::vector<std::vector<bool>>* support = nullptr);

/// log(v) / log(gamma); 0 when v == 1. Throws UndefinedDepthError for v <= 0.
double estimated_depth(double v, double gamma);

/// "state,value" CSV with a header row.
void write_value_csv(std::ostream& os, const ValueTable& v);

}  // namespace worstpath
