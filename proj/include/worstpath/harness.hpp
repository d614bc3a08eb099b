#pragma once

#include "worstpath/env_gen.hpp"
#include "worstpath/policy.hpp"
#include "worstpath/rng.hpp"
#include "worstpath/self_imitation.hpp"
#include "worstpath/syn_tree.hpp"
#include "worstpath/tree_mdp.hpp"
#include "worstpath/values.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace worstpath {

inline constexpr std::size_t kDefaultEvalMaxSteps = 20;

struct GenerationResult {
    bool success = false;
    SynTree tree;
};

/// A single greedy (argmax) rollout.
GenerationResult direct_generate(const TreeMdp& mdp, const StochasticPolicy& pi, StateId root,
                                 std::size_t max_steps = kDefaultEvalMaxSteps);

struct SearchResult {
    bool success = false;
    SynTree tree;
    std::size_t calls_used = 0;
};

/**
 * Restart search under a shared model-call budget. Attempt 0 is greedy, later
 * attempts sample from `pi`; each attempt is capped at min(max_steps, calls
 * left) and stops early once a cycle-guarded leaf makes it fail. Attempt k
 * draws from rng.split(k), so a larger budget replays every attempt a smaller
 * budget made. Returns the first successful tree, otherwise the best one by
 * worst-path return.
 */
SearchResult budgeted_search(const TreeMdp& mdp, const StochasticPolicy& pi, StateId root, std::size_t budget,
                             const Rng& rng, std::size_t max_steps = kDefaultEvalMaxSteps);

/// Reactions in a successful tree. Throws NotSolvedError otherwise.
std::size_t route_length(const SynTree& tree);

/// Non-building-block states with V*(s) > 0, in id order.
std::vector<StateId> solvable_states(const TreeMdp& mdp);

// ---------------------------------------------------------------------------
// Snapshots: the environment format plus "pi <s> <probs...>" and "v <s> <value>".

struct Snapshot {
    Environment env;
    StochasticPolicy policy;
    std::optional<ValueTable> values;
};

std::string serialize_snapshot(const Environment& env, const StochasticPolicy& pi, const ValueTable* values);
Snapshot deserialize_snapshot(std::string_view doc);

// ---------------------------------------------------------------------------
// Experiments

struct EvalConfig {
    /// Environment file; when empty `env` is generated instead.
    std::string env_file;
    EnvConfig env;
    /// Policy snapshot to evaluate; when empty a policy is trained per seed.
    std::string snapshot_file;
    /// Evaluate the base policy without training (ignored when snapshot_file is set).
    bool untrained = false;
    TrainConfig train;
    /// Share of non-building-block states used as training roots (nested across fractions).
    double train_fraction = 1.0;
    /// Evaluation targets; empty means every solvable non-building-block state.
    std::vector<StateId> targets;
    /// Search budgets in model calls; direct generation is always evaluated first.
    std::vector<std::size_t> budgets{100, 200, 500};
    std::size_t max_steps = kDefaultEvalMaxSteps;
    std::vector<std::uint64_t> seeds{0};
    /// Report CSV path. With several seeds one file per seed is written,
    /// "<stem>_seed<k><ext>". Empty: no files.
    std::string out;
};

void check_config(const EvalConfig& cfg);

struct TargetOutcome {
    std::uint64_t seed = 0;
    StateId target{};
    /// nullopt for direct generation.
    std::optional<std::size_t> budget;
    bool success = false;
    std::size_t calls = 0;
    /// Reactions in the returned tree (0 when unsolved).
    std::size_t route_length = 0;
    double worst_path_return = 0.0;
};

struct BudgetSummary {
    std::optional<std::size_t> budget;
    /// Percent, averaged over seeds.
    double success_rate = 0.0;
    /// Over the targets every budget solved in the same seed; 0 when there are none.
    double mean_route_length = 0.0;
};

struct EvalReport {
    std::vector<BudgetSummary> budgets;
    std::vector<TargetOutcome> rows;
};

/// Roots selected by `fraction` of a seed-fixed shuffle of the non-building-block states.
std::vector<StateId> training_roots(const TreeMdp& mdp, double fraction, std::uint64_t seed);

EvalReport run_experiment(const EvalConfig& cfg);

void write_report_csv(std::ostream& os, std::span<const TargetOutcome> rows);
void write_summary(std::ostream& os, const EvalReport& report);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace worstpath
