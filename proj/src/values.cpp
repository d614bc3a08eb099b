#include "worstpath/values.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "worstpath/format.hpp"

namespace worstpath {

namespace {

double min_child_value(const TreeMdp& mdp, const ValueTable& v, StateId s, ActionId a) {
    double m = std::numeric_limits<double>::infinity();
    for (StateId c : mdp.children(s, a)) m = std::min(m, v[c]);
    return m;
}

using Sweep = double (*)(const TreeMdp&, const ValueTable&, const StochasticPolicy*, StateId);

double policy_backup(const TreeMdp& mdp, const ValueTable& v, const StochasticPolicy* pi, StateId s) {
    const double r = reward(mdp, s);
    if (r == 1.0) return 1.0;
    const auto& p = pi->probs[index(s)];
    double acc = 0.0;
    for (std::size_t a = 0; a < p.size(); ++a) {
        if (p[a] == 0.0) continue;
        acc += p[a] * min_child_value(mdp, v, s, action_id(a));
    }
    return r + mdp.gamma() * (1.0 - r) * acc;
}

double optimal_backup(const TreeMdp& mdp, const ValueTable& v, const StochasticPolicy*, StateId s) {
    const double r = reward(mdp, s);
    if (r == 1.0) return 1.0;
    double best = 0.0;
    for (std::size_t a = 0; a < mdp.num_actions(s); ++a) {
        best = std::max(best, min_child_value(mdp, v, s, action_id(a)));
    }
    return r + mdp.gamma() * (1.0 - r) * best;
}

ValueTable sweep(const TreeMdp& mdp, const ValueTable& v, const StochasticPolicy* pi, Sweep backup) {
    ValueTable next(mdp.num_states(), 0.0);
    for (std::size_t s = 0; s < mdp.num_states(); ++s) next.values[s] = backup(mdp, v, pi, state_id(s));
    return next;
}

ValueTable iterate(const TreeMdp& mdp, ValueTable v, const StochasticPolicy* pi, Sweep backup, double tol) {
    if (!(tol > 0.0)) throw ConfigError("tolerance must be positive");
    if (v.size() != mdp.num_states()) throw IndexError("value table size does not match model");
    const std::size_t cap = iteration_cap(tol, mdp.gamma());
    for (std::size_t k = 0; k < cap; ++k) {
        ValueTable next = sweep(mdp, v, pi, backup);
        const double change = sup_distance(next, v);
        v = std::move(next);
        if (change < tol) return v;
    }
    throw ConvergenceError("no convergence to " + format_double(tol) + " within " + std::to_string(cap) +
                           " sweeps");
}

}  // namespace

ValueTable reward_table(const TreeMdp& mdp) {
    ValueTable v(mdp.num_states(), 0.0);
    for (std::size_t s = 0; s < mdp.num_states(); ++s) v.values[s] = reward(mdp, state_id(s));
    return v;
}

double sup_distance(const ValueTable& a, const ValueTable& b) {
    if (a.size() != b.size()) throw IndexError("value tables differ in size");
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.values[i] - b.values[i]));
    return d;
}

std::size_t iteration_cap(double tol, double gamma) {
    return static_cast<std::size_t>(std::ceil(std::log(tol) / std::log(gamma))) + 64;
}

double path_return(const Path& path, const TreeMdp& mdp) {
    if (path.states.empty() || path.states.size() != path.actions.size() + 1) {
        throw PathError("path must have exactly one more state than actions");
    }
    for (std::size_t t = 0; t < path.actions.size(); ++t) {
        const StateId s = path.states[t];
        if (!mdp.is_feasible(s, path.actions[t])) {
            throw PathError("action " + std::to_string(index(path.actions[t])) + " not feasible at step " +
                            std::to_string(t));
        }
        const auto kids = mdp.children(s, path.actions[t]);
        if (std::find(kids.begin(), kids.end(), path.states[t + 1]) == kids.end()) {
            throw PathError("state at step " + std::to_string(t + 1) + " is not a child of its predecessor");
        }
    }
    // Repeated multiplication rather than pow() so the result is bit-identical
    // to the value recursion.
    double ret = reward(mdp, path.states.back());
    for (std::size_t t = 0; t < path.actions.size(); ++t) ret = mdp.gamma() * ret;
    return ret;
}

double tree_worst_path_return(const SynTree& tree, const TreeMdp& mdp, std::size_t node) {
    std::vector<double> ret(tree.size(), 0.0);
    for (std::size_t i = tree.size(); i-- > node;) {
        const SynNode& n = tree.node(i);
        switch (n.status) {
        case NodeStatus::building_block:
            ret[i] = 1.0;
            break;
        case NodeStatus::unexpanded:
            ret[i] = 0.0;
            break;
        case NodeStatus::expanded: {
            double m = std::numeric_limits<double>::infinity();
            for (std::size_t c : n.children) m = std::min(m, ret[c]);
            ret[i] = mdp.gamma() * m;
            break;
        }
        }
    }
    return ret.at(node);
}

double q_value(const TreeMdp& mdp, const ValueTable& v, StateId s, ActionId a) {
    const double r = reward(mdp, s);
    if (r == 1.0) return 1.0;
    return r + mdp.gamma() * (1.0 - r) * min_child_value(mdp, v, s, a);
}

double advantage(const TreeMdp& mdp, const ValueTable& v, StateId s, ActionId a) {
    return q_value(mdp, v, s, a) - v[s];
}

ValueTable evaluate_policy(const TreeMdp& mdp, const StochasticPolicy& pi, double tol) {
    if (pi.probs.size() != mdp.num_states()) throw IndexError("policy does not cover every state");
    return iterate(mdp, reward_table(mdp), &pi, policy_backup, tol);
}

ValueTable bellman_optimal_backup(const TreeMdp& mdp, const ValueTable& v) {
    if (v.size() != mdp.num_states()) throw IndexError("value table size does not match model");
    return sweep(mdp, v, nullptr, optimal_backup);
}

ValueTable value_iteration(const TreeMdp& mdp, double tol) {
    return iterate(mdp, reward_table(mdp), nullptr, optimal_backup, tol);
}

ValueTable value_iteration(const TreeMdp& mdp, const ValueTable& initial, double tol) {
    return iterate(mdp, initial, nullptr, optimal_backup, tol);
}

StochasticPolicy greedy_policy(const TreeMdp& mdp, const ValueTable& v,
                               const std::vector<std::vector<bool>>* support) {
    StochasticPolicy pi;
    pi.probs.resize(mdp.num_states());
    pi.support.resize(mdp.num_states());
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
        const StateId sid = state_id(s);
        const std::size_t n = mdp.num_actions(sid);
        pi.probs[s].assign(n, 0.0);
        if (support) {
            pi.support[s] = support->at(s);
        } else {
            pi.support[s].assign(n, true);
        }
        if (n == 0) continue;
        std::optional<std::size_t> best;
        double best_value = -1.0;
        for (std::size_t a = 0; a < n; ++a) {
            if (!pi.support[s].at(a)) continue;
            const double m = min_child_value(mdp, v, sid, action_id(a));
            if (!best || m > best_value) {
                best = a;
                best_value = m;
            }
        }
        if (!best) throw DegeneratePolicyError("state " + std::to_string(s) + " has an empty support");
        pi.probs[s][*best] = 1.0;
    }
    return pi;
}

double estimated_depth(double v, double gamma) {
    if (!(v > 0.0)) throw UndefinedDepthError("depth undefined for value " + format_double(v));
    if (v == 1.0) return 0.0;
    return std::log(v) / std::log(gamma);
}

void write_value_csv(std::ostream& os, const ValueTable& v) {
    os << "state,value\n";
    for (std::size_t s = 0; s < v.size(); ++s) os << s << ',' << format_double(v.values[s]) << '\n';
}

}  // namespace worstpath
