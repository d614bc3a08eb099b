#pragma once

#include "worstpath/policy.hpp"
#include "worstpath/rng.hpp"
#include "worstpath/syn_tree.hpp"
#include "worstpath/tree_mdp.hpp"
#include "worstpath/values.hpp"

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace worstpath {

using ActionChooser = std::function<ActionId(StateId)>;

struct ExploreOptions {
    std::size_t max_steps = 50;
    /// Stop as soon as a cycle-guarded leaf makes failure certain.
    bool stop_on_failure = false;
};

/**
 * FIFO expansion of `root`: pop a state, choose an action, attach its
 * children, enqueue the non-building-block ones. One expansion is one step.
 * A child that repeats one of its ancestors is attached but left unexpanded.
 * Whatever remains queued when the step cap is hit stays unexpanded.
 */
SynTree explore_with(const TreeMdp& mdp, StateId root, const ExploreOptions& opts, const ActionChooser& choose);

/// Rollout sampling actions from `pi`.
SynTree explore(const TreeMdp& mdp, const StochasticPolicy& pi, StateId root, std::size_t max_steps, Rng& rng);

/// Rollout taking pi's argmax action everywhere.
SynTree explore_greedy(const TreeMdp& mdp, const StochasticPolicy& pi, StateId root, std::size_t max_steps);

/// Every leaf below `node` is a building block.
bool is_successful(const SynTree& tree, std::size_t node = 0);

struct Branch {
    StateId state{};
    ActionId action{};
    ChildList children;

    friend bool operator==(const Branch&, const Branch&) = default;
};

/// One branch per expanded node inside a successful subtree, breadth-first.
std::vector<Branch> extract_successful_branches(const SynTree& tree);

/// Bounded FIFO of branches; the oldest entries are evicted first.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity = 20000);

    void push(std::span<const Branch> branches);
    /// `n` uniform draws with replacement. Throws EmptyBufferError when empty and n > 0.
    std::vector<Branch> sample(std::size_t n, Rng& rng) const;

    std::size_t size() const noexcept { return entries_.size(); }
    std::size_t capacity() const noexcept { return capacity_; }
    bool empty() const noexcept { return entries_.empty(); }
    const std::deque<Branch>& entries() const noexcept { return entries_; }

private:
    std::size_t capacity_;
    std::deque<Branch> entries_;
};

struct TrainConfig {
    double beta = 10.0;
    double clip_c = 20.0;
    std::size_t buffer_capacity = 20000;
    std::size_t trees_per_iter = 36;
    std::size_t updates_per_iter = 5;
    std::size_t num_workers = 6;
    std::size_t max_steps = 50;
    double value_lr = 0.5;
    double policy_lr = 0.1;
    double target_rate = 0.05;
    std::size_t batch_size = 256;
    std::size_t iterations = 100;
    /// Step cap of the greedy rollouts used for the per-iteration metrics.
    std::size_t eval_max_steps = 20;
    std::uint64_t seed = 0;
};

void check_config(const TrainConfig& cfg);

/// Main value table plus its slowly tracking target copy.
struct TabularValueLearner {
    ValueTable main;
    ValueTable target;

    /// Both tables start at the reward vector.
    static TabularValueLearner init(const TreeMdp& mdp);
};

/// One tabular TD step per branch toward r + gamma (1-r) min target(children),
/// then target <- (1 - target_rate) target + target_rate main.
void value_update(TabularValueLearner& learner, const TreeMdp& mdp, std::span<const Branch> batch, double lr,
                  double target_rate);

/// min(C, exp(beta * adv)).
double clipped_weight(double adv, double beta, double clip_c);

/**
 * One gradient-ascent step on sum_batch w log pi(a|s) over per-state logits of
 * masked-in actions, with w from the advantage under learner.main. Returns the
 * updated policy; masked-out actions keep probability 0.
 */
StochasticPolicy policy_update_sampled(const StochasticPolicy& pi, const TabularValueLearner& learner,
                                       const TreeMdp& mdp, std::span<const Branch> batch, const TrainConfig& cfg,
                                       double lr);

/// Per-(state, action) advantages under `v`; building blocks get empty rows.
std::vector<std::vector<double>> advantage_table(const TreeMdp& mdp, const ValueTable& v);

/// pi'(a|s) = pi(a|s) exp(beta A(s,a)) / Z(s).
StochasticPolicy policy_update_exact(const StochasticPolicy& pi, const std::vector<std::vector<double>>& advantages,
                                     double beta);

struct IterationMetrics {
    std::size_t iteration = 0;
    std::size_t trees_collected = 0;
    std::size_t branches_added = 0;
    std::size_t buffer_size = 0;
    /// Percent of training roots solved by a greedy rollout after the iteration.
    double dg_success_rate = 0.0;
    double mean_worst_path_return = 0.0;
    /// Mean reactions over the greedily solved roots (0 when none).
    double mean_route_length = 0.0;
};

void write_metrics_csv(std::ostream& os, std::span<const IterationMetrics> metrics);

struct TrainResult {
    StochasticPolicy policy;
    TabularValueLearner learner;
    std::vector<IterationMetrics> metrics;
};

/// The self-imitation loop. Bit-reproducible for a given config regardless of
/// num_workers scheduling.
TrainResult train(const TreeMdp& mdp, const BasePolicy& base, std::span<const StateId> roots,
                  const TrainConfig& cfg);

}  // namespace worstpath
