#include "worstpath/policy.hpp"

#include <cmath>
#include <string>

namespace worstpath {

namespace {

void check_distribution(const TreeMdp& mdp, std::size_t s, const std::vector<double>& p,
                        std::vector<Violation>& out) {
    const StateId sid = state_id(s);
    const std::size_t n = mdp.transitions()[s].size();
    if (p.size() != n) {
        out.push_back({sid, std::nullopt,
                       "expected " + std::to_string(n) + " probabilities, got " + std::to_string(p.size())});
        return;
    }
    if (n == 0) return;
    double sum = 0.0;
    bool positive = false;
    for (std::size_t a = 0; a < n; ++a) {
        if (!(p[a] >= 0.0) || !std::isfinite(p[a])) {
            out.push_back({sid, action_id(a), "probability " + std::to_string(p[a]) + " is not a valid weight"});
        }
        if (p[a] > 0.0) positive = true;
        sum += p[a];
    }
    if (!positive) {
        out.push_back({sid, std::nullopt, "no action has positive probability"});
    } else if (std::abs(sum - 1.0) > 1e-9) {
        out.push_back({sid, std::nullopt, "probabilities sum to " + std::to_string(sum)});
    }
}

}  // namespace

std::vector<Violation> validate(const TreeMdp& mdp, const BasePolicy& base) {
    std::vector<Violation> out;
    if (base.probs.size() != mdp.num_states()) {
        out.push_back({std::nullopt, std::nullopt, "base policy covers " + std::to_string(base.probs.size()) +
                                                       " states, model has " + std::to_string(mdp.num_states())});
        return out;
    }
    for (std::size_t s = 0; s < mdp.num_states(); ++s) check_distribution(mdp, s, base.probs[s], out);
    return out;
}

std::vector<Violation> validate(const TreeMdp& mdp, const StochasticPolicy& pi) {
    std::vector<Violation> out;
    if (pi.probs.size() != mdp.num_states() || pi.support.size() != mdp.num_states()) {
        out.push_back({std::nullopt, std::nullopt, "policy does not cover every state"});
        return out;
    }
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
        check_distribution(mdp, s, pi.probs[s], out);
        if (pi.support[s].size() != pi.probs[s].size()) {
            out.push_back({state_id(s), std::nullopt, "support mask size mismatch"});
            continue;
        }
        for (std::size_t a = 0; a < pi.probs[s].size(); ++a) {
            if (!pi.support[s][a] && pi.probs[s][a] != 0.0) {
                out.push_back({state_id(s), action_id(a), "positive probability outside support"});
            }
        }
    }
    return out;
}

ActionId StochasticPolicy::argmax(StateId s) const {
    const auto& p = probs.at(index(s));
    std::size_t best = 0;
    for (std::size_t a = 1; a < p.size(); ++a) {
        if (p[a] > p[best]) best = a;
    }
    return action_id(best);
}

ActionId StochasticPolicy::sample(StateId s, Rng& rng) const {
    const auto& p = probs.at(index(s));
    double total = 0.0;
    for (double x : p) total += x;
    const double u = rng.uniform() * total;
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t a = 0; a < p.size(); ++a) {
        if (p[a] <= 0.0) continue;
        acc += p[a];
        last_positive = a;
        if (u < acc) return action_id(a);
    }
    return action_id(last_positive);
}

StochasticPolicy StochasticPolicy::from_base(const BasePolicy& base) {
    StochasticPolicy pi;
    pi.probs = base.probs;
    pi.support.resize(base.probs.size());
    for (std::size_t s = 0; s < base.probs.size(); ++s) {
        for (double p : base.probs[s]) pi.support[s].push_back(p > 0.0);
    }
    return pi;
}

StochasticPolicy StochasticPolicy::uniform(const TreeMdp& mdp) {
    StochasticPolicy pi;
    pi.probs.resize(mdp.num_states());
    pi.support.resize(mdp.num_states());
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
        const std::size_t n = mdp.transitions()[s].size();
        pi.probs[s].assign(n, n ? 1.0 / static_cast<double>(n) : 0.0);
        pi.support[s].assign(n, true);
    }
    return pi;
}

StochasticPolicy StochasticPolicy::deterministic(const TreeMdp& mdp, const std::vector<ActionId>& choice) {
    StochasticPolicy pi;
    pi.probs.resize(mdp.num_states());
    pi.support.resize(mdp.num_states());
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
        const std::size_t n = mdp.transitions()[s].size();
        pi.probs[s].assign(n, 0.0);
        pi.support[s].assign(n, true);
        if (n > 0) pi.probs[s].at(index(choice.at(s))) = 1.0;
    }
    return pi;
}

}  // namespace worstpath
