#include "worstpath/self_imitation.hpp"

#include "worstpath/format.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <thread>

namespace worstpath {

SynTree explore_with(const TreeMdp& mdp, StateId root, const ExploreOptions& opts, const ActionChooser& choose) {
    SynTree tree(mdp, root);
    std::deque<std::size_t> queue;
    if (tree.node(0).status == NodeStatus::unexpanded) queue.push_back(0);
    std::size_t step = 0;
    bool failed = false;
    while (!queue.empty() && step < opts.max_steps) {
        const std::size_t node = queue.front();
        queue.pop_front();
        const std::size_t first = tree.expand_node(mdp, node, choose(tree.node(node).state));
        for (std::size_t c = first; c < tree.size(); ++c) {
            const SynNode& child = tree.node(c);
            if (child.status != NodeStatus::unexpanded) continue;
            if (tree.on_ancestor_path(node, child.state)) {
                failed = true;
            } else {
                queue.push_back(c);
            }
        }
        ++step;
        if (failed && opts.stop_on_failure) break;
    }
    return tree;
}

SynTree explore(const TreeMdp& mdp, const StochasticPolicy& pi, StateId root, std::size_t max_steps, Rng& rng) {
    return explore_with(mdp, root, {max_steps, false}, [&](StateId s) { return pi.sample(s, rng); });
}

SynTree explore_greedy(const TreeMdp& mdp, const StochasticPolicy& pi, StateId root, std::size_t max_steps) {
    return explore_with(mdp, root, {max_steps, false}, [&](StateId s) { return pi.argmax(s); });
}

namespace {

std::vector<bool> success_flags(const SynTree& tree) {
    std::vector<bool> ok(tree.size(), false);
    for (std::size_t i = tree.size(); i-- > 0;) {
        const SynNode& n = tree.node(i);
        switch (n.status) {
        case NodeStatus::building_block:
            ok[i] = true;
            break;
        case NodeStatus::unexpanded:
            ok[i] = false;
            break;
        case NodeStatus::expanded:
            ok[i] = std::all_of(n.children.begin(), n.children.end(), [&](std::size_t c) { return ok[c]; });
            break;
        }
    }
    return ok;
}

}  // namespace

bool is_successful(const SynTree& tree, std::size_t node) {
    if (node >= tree.size()) throw IndexError("node " + std::to_string(node) + " out of range");
    return success_flags(tree)[node];
}

std::vector<Branch> extract_successful_branches(const SynTree& tree) {
    const auto ok = success_flags(tree);
    std::vector<Branch> out;
    std::deque<std::size_t> bfs{tree.root()};
    while (!bfs.empty()) {
        const std::size_t i = bfs.front();
        bfs.pop_front();
        const SynNode& n = tree.node(i);
        if (n.status == NodeStatus::expanded && ok[i]) {
            Branch b{n.state, *n.action, {}};
            for (std::size_t c : n.children) b.children.push_back(tree.node(c).state);
            out.push_back(std::move(b));
        }
        for (std::size_t c : n.children) bfs.push_back(c);
    }
    return out;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ConfigError("replay buffer capacity must be positive");
}

void ReplayBuffer::push(std::span<const Branch> branches) {
    for (const Branch& b : branches) {
        entries_.push_back(b);
        if (entries_.size() > capacity_) entries_.pop_front();
    }
}

std::vector<Branch> ReplayBuffer::sample(std::size_t n, Rng& rng) const {
    if (n == 0) return {};
    if (entries_.empty()) throw EmptyBufferError("cannot sample from an empty replay buffer");
    std::vector<Branch> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(entries_[rng.uniform_index(entries_.size())]);
    return out;
}

void check_config(const TrainConfig& cfg) {
    if (!(cfg.beta >= 0.0)) throw ConfigError("beta must be non-negative");
    if (!(cfg.clip_c > 0.0)) throw ConfigError("clip_c must be positive");
    for (double r : {cfg.value_lr, cfg.policy_lr, cfg.target_rate}) {
        if (!(r > 0.0 && r <= 1.0)) throw ConfigError("learning and tracking rates must lie in (0,1]");
    }
    for (std::size_t c : {cfg.buffer_capacity, cfg.trees_per_iter, cfg.updates_per_iter, cfg.num_workers,
                          cfg.max_steps, cfg.batch_size, cfg.eval_max_steps}) {
        if (c == 0) throw ConfigError("counts must be positive");
    }
}

TabularValueLearner TabularValueLearner::init(const TreeMdp& mdp) {
    const ValueTable r = reward_table(mdp);
    return {r, r};
}

void value_update(TabularValueLearner& learner, const TreeMdp& mdp, std::span<const Branch> batch, double lr,
                  double target_rate) {
    const double g = mdp.gamma();
    for (const Branch& b : batch) {
        const double r = reward(mdp, b.state);
        double m = std::numeric_limits<double>::infinity();
        for (StateId c : b.children) m = std::min(m, learner.target[c]);
        const double y = r + g * (1.0 - r) * m;
        double& v = learner.main[b.state];
        v += lr * (y - v);
    }
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
        if (mdp.building_blocks()[s]) {
            learner.main.values[s] = 1.0;
            learner.target.values[s] = 1.0;
            continue;
        }
        learner.target.values[s] = (1.0 - target_rate) * learner.target.values[s] + target_rate * learner.main.values[s];
    }
}

double clipped_weight(double adv, double beta, double clip_c) {
    return std::min(clip_c, std::exp(beta * adv));
}

StochasticPolicy policy_update_sampled(const StochasticPolicy& pi, const TabularValueLearner& learner,
                                       const TreeMdp& mdp, std::span<const Branch> batch, const TrainConfig& cfg,
                                       double lr) {
    std::vector<std::vector<double>> grad(pi.probs.size());
    for (const Branch& b : batch) {
        const std::size_t s = index(b.state);
        if (!mdp.is_feasible(b.state, b.action) || !pi.in_support(b.state, b.action)) {
            throw SupportViolationError("branch action " + std::to_string(index(b.action)) + " at state " +
                                        std::to_string(s) + " lies outside the policy support");
        }
        const double w = clipped_weight(advantage(mdp, learner.main, b.state, b.action), cfg.beta, cfg.clip_c);
        auto& g = grad[s];
        if (g.empty()) g.assign(pi.probs[s].size(), 0.0);
        // d/dlogit_k of w log softmax(logits)[a] = w (1[k == a] - pi(k|s)).
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (pi.support[s][k]) g[k] -= w * pi.probs[s][k];
        }
        g[index(b.action)] += w;
    }

    StochasticPolicy out = pi;
    for (std::size_t s = 0; s < grad.size(); ++s) {
        if (grad[s].empty()) continue;
        const auto& p = pi.probs[s];
        const auto& mask = pi.support[s];
        std::vector<double> logits(p.size(), -std::numeric_limits<double>::infinity());
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < p.size(); ++k) {
            if (!mask[k]) continue;
            // Floor keeps underflowed in-support actions recoverable.
            logits[k] = std::log(std::max(p[k], 1e-300)) + lr * grad[s][k];
            mx = std::max(mx, logits[k]);
        }
        double z = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) {
            out.probs[s][k] = mask[k] ? std::exp(logits[k] - mx) : 0.0;
            z += out.probs[s][k];
        }
        for (double& x : out.probs[s]) x /= z;
    }
    return out;
}

std::vector<std::vector<double>> advantage_table(const TreeMdp& mdp, const ValueTable& v) {
    std::vector<std::vector<double>> out(mdp.num_states());
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
        const StateId sid = state_id(s);
        for (std::size_t a = 0; a < mdp.num_actions(sid); ++a) out[s].push_back(advantage(mdp, v, sid, action_id(a)));
    }
    return out;
}

StochasticPolicy policy_update_exact(const StochasticPolicy& pi, const std::vector<std::vector<double>>& advantages,
                                     double beta) {
    if (advantages.size() != pi.probs.size()) throw IndexError("advantage table does not cover every state");
    StochasticPolicy out = pi;
    for (std::size_t s = 0; s < pi.probs.size(); ++s) {
        const auto& p = pi.probs[s];
        if (p.empty()) continue;
        const auto& adv = advantages[s];
        if (adv.size() != p.size()) {
            throw IndexError("advantage row size mismatch at state " + std::to_string(s));
        }
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < p.size(); ++a) {
            if (p[a] > 0.0) mx = std::max(mx, beta * adv[a]);
        }
        double z = 0.0;
        for (std::size_t a = 0; a < p.size(); ++a) {
            out.probs[s][a] = p[a] > 0.0 ? p[a] * std::exp(beta * adv[a] - mx) : 0.0;
            z += out.probs[s][a];
        }
        if (!(z > 0.0)) throw DegeneratePolicyError("state " + std::to_string(s) + " has no probability mass");
        for (double& x : out.probs[s]) x /= z;
    }
    return out;
}

void write_metrics_csv(std::ostream& os, std::span<const IterationMetrics> metrics) {
    os << "iteration,trees_collected,branches_added,buffer_size,dg_success_rate,mean_worst_path_return,"
          "mean_route_length\n";
    for (const auto& m : metrics) {
        os << m.iteration << ',' << m.trees_collected << ',' << m.branches_added << ',' << m.buffer_size << ','
           << format_double(m.dg_success_rate) << ',' << format_double(m.mean_worst_path_return) << ','
           << format_double(m.mean_route_length) << '\n';
    }
}

namespace {

/// Round-robin over the roots, reshuffled at the start of every pass.
class RootCycle {
public:
    RootCycle(std::span<const StateId> roots, Rng rng) : order_(roots.begin(), roots.end()), rng_(rng) {}

    StateId next() {
        if (pos_ == 0) {
            for (std::size_t i = order_.size(); i > 1; --i) std::swap(order_[i - 1], order_[rng_.uniform_index(i)]);
        }
        const StateId s = order_[pos_];
        pos_ = (pos_ + 1) % order_.size();
        return s;
    }

private:
    std::vector<StateId> order_;
    Rng rng_;
    std::size_t pos_ = 0;
};

std::vector<SynTree> collect_trees(const TreeMdp& mdp, const StochasticPolicy& snapshot,
                                   const std::vector<StateId>& roots, const TrainConfig& cfg, const Rng& iter_rng) {
    std::vector<std::optional<SynTree>> slots(roots.size());
    std::vector<std::exception_ptr> errors(cfg.num_workers);
    auto work = [&](std::size_t w) {
        try {
            for (std::size_t j = w; j < roots.size(); j += cfg.num_workers) {
                Rng rng = iter_rng.split(j);
                slots[j] = explore(mdp, snapshot, roots[j], cfg.max_steps, rng);
            }
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };
    {
        std::vector<std::jthread> workers;
        for (std::size_t w = 1; w < cfg.num_workers; ++w) workers.emplace_back(work, w);
        work(0);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    std::vector<SynTree> trees;
    trees.reserve(roots.size());
    for (auto& t : slots) trees.push_back(std::move(*t));
    return trees;
}

}  // namespace

TrainResult train(const TreeMdp& mdp, const BasePolicy& base, std::span<const StateId> roots,
                  const TrainConfig& cfg) {
    check_config(cfg);
    TrainResult result{StochasticPolicy::from_base(base), TabularValueLearner::init(mdp), {}};
    if (cfg.iterations == 0) return result;
    if (roots.empty()) throw ConfigError("training needs at least one root");

    const Rng master(cfg.seed);
    RootCycle cycle(roots, master.split(0));
    Rng update_rng = master.split(1);
    ReplayBuffer buffer(cfg.buffer_capacity);

    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        std::vector<StateId> batch_roots;
        for (std::size_t j = 0; j < cfg.trees_per_iter; ++j) batch_roots.push_back(cycle.next());

        const StochasticPolicy snapshot = result.policy;
        const auto trees = collect_trees(mdp, snapshot, batch_roots, cfg, master.split(1000 + it));

        IterationMetrics m;
        m.iteration = it + 1;
        m.trees_collected = trees.size();
        for (const SynTree& t : trees) {
            const auto brs = extract_successful_branches(t);
            m.branches_added += brs.size();
            buffer.push(brs);
        }
        m.buffer_size = buffer.size();

        if (!buffer.empty()) {
            for (std::size_t u = 0; u < cfg.updates_per_iter; ++u) {
                const auto batch = buffer.sample(cfg.batch_size, update_rng);
                value_update(result.learner, mdp, batch, cfg.value_lr, cfg.target_rate);
                result.policy = policy_update_sampled(result.policy, result.learner, mdp, batch, cfg, cfg.policy_lr);
            }
        }

        std::size_t solved = 0, route_total = 0;
        double ret_total = 0.0;
        for (StateId r : roots) {
            const SynTree t = explore_greedy(mdp, result.policy, r, cfg.eval_max_steps);
            ret_total += tree_worst_path_return(t, mdp);
            if (is_successful(t)) {
                ++solved;
                route_total += t.num_expanded();
            }
        }
        const double n = static_cast<double>(roots.size());
        m.dg_success_rate = 100.0 * static_cast<double>(solved) / n;
        m.mean_worst_path_return = ret_total / n;
        m.mean_route_length = solved ? static_cast<double>(route_total) / static_cast<double>(solved) : 0.0;
        result.metrics.push_back(m);
    }
    return result;
}

}  // namespace worstpath
