#include "worstpath/oracle.hpp"

#include "worstpath/self_imitation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace worstpath::oracle {

DeterministicPolicyEnumeration::DeterministicPolicyEnumeration(const TreeMdp& mdp)
    : radix_(mdp.num_states()), choice_(mdp.num_states(), ActionId{0}) {
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
        radix_[s] = std::max<std::size_t>(1, mdp.transitions()[s].size());
        if (count_ > UINT64_MAX / radix_[s]) {
            count_ = UINT64_MAX;
        } else if (count_ != UINT64_MAX) {
            count_ *= radix_[s];
        }
    }
}

bool DeterministicPolicyEnumeration::next() {
    for (std::size_t s = 0; s < radix_.size(); ++s) {
        const std::size_t a = index(choice_[s]) + 1;
        if (a < radix_[s]) {
            choice_[s] = action_id(a);
            return true;
        }
        choice_[s] = ActionId{0};
    }
    return false;
}

namespace {

enum class Mark : unsigned char { unvisited, on_path, done };

struct Recursion {
    const TreeMdp& mdp;
    const std::vector<ActionId>& choice;
    std::size_t cutoff;
    std::vector<Mark> mark;
    std::vector<double> value;
    std::vector<std::size_t> height;

    // Returns false when the expansion of s is cyclic or too deep.
    bool visit(std::size_t s) {
        if (mark[s] == Mark::done) return value[s] > 0.0;
        if (mark[s] == Mark::on_path) return false;
        if (mdp.building_blocks()[s]) {
            mark[s] = Mark::done;
            value[s] = 1.0;
            height[s] = 0;
            return true;
        }
        mark[s] = Mark::on_path;
        bool ok = true;
        double m = std::numeric_limits<double>::infinity();
        std::size_t h = 0;
        for (StateId c : mdp.children(state_id(s), choice[s])) {
            if (!visit(index(c))) {
                ok = false;
                continue;
            }
            m = std::min(m, value[index(c)]);
            h = std::max(h, height[index(c)] + 1);
        }
        if (h > cutoff) ok = false;
        mark[s] = Mark::done;
        value[s] = ok ? mdp.gamma() * m : 0.0;
        height[s] = h;
        return ok;
    }
};

}  // namespace

ValueTable deterministic_value(const TreeMdp& mdp, const std::vector<ActionId>& choice, double tol) {
    const std::size_t n = mdp.num_states();
    Recursion rec{mdp, choice, iteration_cap(tol, mdp.gamma()), std::vector<Mark>(n, Mark::unvisited),
                  std::vector<double>(n, 0.0), std::vector<std::size_t>(n, 0)};
    for (std::size_t s = 0; s < n; ++s) rec.visit(s);
    return ValueTable(std::move(rec.value));
}

ValueTable brute_force_v_star(const TreeMdp& mdp, double tol) {
    DeterministicPolicyEnumeration policies(mdp);
    if (policies.count() > kMaxPolicies) {
        throw SizeGuardError("brute force over " + std::to_string(policies.count()) + " policies exceeds the guard of " +
                             std::to_string(kMaxPolicies));
    }
    ValueTable best(mdp.num_states(), 0.0);
    do {
        const ValueTable v = deterministic_value(mdp, policies.current(), tol);
        for (std::size_t s = 0; s < v.size(); ++s) best.values[s] = std::max(best.values[s], v.values[s]);
    } while (policies.next());
    return best;
}

MonteCarloEstimate monte_carlo_objective(const TreeMdp& mdp, const StochasticPolicy& pi, StateId root, std::size_t n,
                                         Rng& rng, std::size_t max_steps) {
    if (n == 0) throw ConfigError("monte carlo estimate needs n >= 1");
    // Welford keeps the variance exactly 0 when every sample is identical.
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const SynTree t = explore(mdp, pi, root, max_steps, rng);
        const double x = tree_worst_path_return(t, mdp);
        const double delta = x - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (x - mean);
    }
    MonteCarloEstimate est;
    est.mean = mean;
    if (n > 1) est.standard_error = std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
    return est;
}

ImprovementReport check_improvement(const TreeMdp& mdp, const StochasticPolicy& before,
                                    const StochasticPolicy& after, double tol, double eval_tol) {
    const ValueTable vb = evaluate_policy(mdp, before, eval_tol);
    const ValueTable va = evaluate_policy(mdp, after, eval_tol);
    ImprovementReport rep;
    rep.worst_drop = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
        const double drop = vb.values[s] - va.values[s];
        if (drop > rep.worst_drop) {
            rep.worst_drop = drop;
            rep.worst_state = state_id(s);
        }
    }
    rep.improved = rep.worst_drop <= tol;
    return rep;
}

}  // namespace worstpath::oracle
