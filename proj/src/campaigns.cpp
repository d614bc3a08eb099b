#include "worstpath/campaigns.hpp"

#include "worstpath/errors.hpp"
#include "worstpath/oracle.hpp"
#include "worstpath/policy.hpp"
#include "worstpath/self_imitation.hpp"
#include "worstpath/values.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

namespace worstpath::oracle {

namespace {

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void record(CampaignResult& r, double excess) {
    ++r.trials;
    if (excess > 0.0) {
        ++r.violations;
        r.worst_excess = std::max(r.worst_excess, excess);
    }
}

std::vector<StateId> non_terminal(const TreeMdp& mdp) {
    std::vector<StateId> out;
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
        if (!mdp.building_blocks()[s]) out.push_back(state_id(s));
    }
    return out;
}

}  // namespace

Environment random_environment(Rng& rng, std::size_t min_states, std::size_t max_states, std::size_t max_actions) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        EnvConfig cfg;
        cfg.num_states = min_states + rng.uniform_index(max_states - min_states + 1);
        cfg.max_actions_per_state = max_actions;
        cfg.gamma = 0.5 + 0.49 * rng.uniform();
        cfg.seed = rng.next_u64();
        try {
            return generate(cfg);
        } catch (const GenerationError&) {
        }
    }
    throw GenerationError("no random environment generated in 1000 attempts");
}

CampaignResult contraction_campaign(std::uint64_t seed, std::size_t trials, std::size_t max_states, double slack) {
    CampaignResult r{.name = "contraction"};
    Stopwatch clock;
    Rng rng(seed);
    const std::size_t per_env = 10;
    while (r.trials < trials) {
        const Environment env = random_environment(rng, 4, max_states, 4);
        const std::size_t n = env.mdp.num_states();
        for (std::size_t k = 0; k < per_env && r.trials < trials; ++k) {
            ValueTable v1(n, 0.0), v2(n, 0.0);
            for (std::size_t s = 0; s < n; ++s) {
                v1.values[s] = rng.uniform();
                // Every other pair is a small perturbation, the regime where rounding matters.
                v2.values[s] = k % 2 ? std::clamp(v1.values[s] + 1e-6 * (rng.uniform() - 0.5), 0.0, 1.0) : rng.uniform();
            }
            const double lhs = sup_distance(bellman_optimal_backup(env.mdp, v1), bellman_optimal_backup(env.mdp, v2));
            record(r, lhs - env.mdp.gamma() * sup_distance(v1, v2) - slack);
        }
    }
    r.seconds = clock.seconds();
    return r;
}

CampaignResult fixed_point_campaign(std::uint64_t seed, std::size_t envs, double tol) {
    CampaignResult r{.name = "fixed-point"};
    Stopwatch clock;
    Rng rng(seed);
    for (std::size_t i = 0; i < envs; ++i) {
        const Environment env = random_environment(rng, 4, 200, 4);
        const std::size_t n = env.mdp.num_states();
        const ValueTable from_zero = value_iteration(env.mdp, ValueTable(n, 0.0), 1e-12);
        const ValueTable from_one = value_iteration(env.mdp, ValueTable(n, 1.0), 1e-12);
        const double gap = std::max({sup_distance(from_zero, from_one),
                                     sup_distance(from_zero, bellman_optimal_backup(env.mdp, from_zero)),
                                     sup_distance(from_one, bellman_optimal_backup(env.mdp, from_one))});
        record(r, gap - tol);
    }
    r.seconds = clock.seconds();
    return r;
}

CampaignResult brute_force_campaign(std::uint64_t seed, std::size_t envs, double tol) {
    CampaignResult r{.name = "brute-force"};
    Stopwatch clock;
    Rng rng(seed);
    while (r.trials < envs) {
        const Environment env = random_environment(rng, 4, 14, 3);
        if (non_terminal(env.mdp).size() > 10) continue;
        const ValueTable v_star = value_iteration(env.mdp, 1e-12);
        const ValueTable brute = brute_force_v_star(env.mdp, 1e-12);
        const StochasticPolicy greedy = greedy_policy(env.mdp, v_star);
        const ValueTable v_greedy = evaluate_policy(env.mdp, greedy, 1e-12);
        record(r, std::max(sup_distance(v_star, brute), sup_distance(v_greedy, v_star)) - tol);
    }
    r.seconds = clock.seconds();
    return r;
}

CampaignResult improvement_campaign(std::uint64_t seed, std::size_t envs, std::size_t rounds, double tol) {
    CampaignResult r{.name = "improvement"};
    Stopwatch clock;
    Rng rng(seed);
    constexpr std::array<double, 3> betas{0.5, 1.0, 5.0};
    for (std::size_t i = 0; i < envs; ++i) {
        const Environment env = random_environment(rng, 4, 12, 3);
        for (double beta : betas) {
            StochasticPolicy pi = StochasticPolicy::from_base(env.base);
            for (std::size_t k = 0; k < rounds; ++k) {
                const ValueTable v = evaluate_policy(env.mdp, pi, 1e-13);
                StochasticPolicy next = policy_update_exact(pi, advantage_table(env.mdp, v), beta);
                const ImprovementReport rep = check_improvement(env.mdp, pi, next, tol, 1e-13);
                record(r, rep.improved ? 0.0 : rep.worst_drop - tol);
                pi = std::move(next);
            }
        }
    }
    r.seconds = clock.seconds();
    return r;
}

CampaignResult rollout_campaign(std::uint64_t seed, std::size_t policies, std::size_t samples) {
    CampaignResult r{.name = "rollout"};
    Stopwatch clock;
    Rng rng(seed);
    for (std::size_t i = 0; i < policies; ++i) {
        const Environment env = random_environment(rng, 4, 60, 4);
        const TreeMdp& mdp = env.mdp;
        std::vector<ActionId> choice(mdp.num_states(), ActionId{0});
        for (std::size_t s = 0; s < mdp.num_states(); ++s) {
            const std::size_t k = mdp.transitions()[s].size();
            if (k > 0) choice[s] = action_id(rng.uniform_index(k));
        }
        const StochasticPolicy pi = StochasticPolicy::deterministic(mdp, choice);
        const std::vector<StateId> roots = non_terminal(mdp);
        const StateId root = roots[rng.uniform_index(roots.size())];

        Rng sampler = rng.split(i);
        const MonteCarloEstimate mc = monte_carlo_objective(mdp, pi, root, samples, sampler);
        const double exact = evaluate_policy(mdp, pi)[root];
        Rng tree_rng = rng.split(i + policies);
        const SynTree tree = explore(mdp, pi, root, 100000, tree_rng);
        const double realised = tree_worst_path_return(tree, mdp);
        const bool ok = mc.standard_error == 0.0 && mc.mean == exact && realised == exact;
        record(r, ok ? 0.0 : std::max({std::abs(mc.mean - exact), std::abs(realised - exact), mc.standard_error,
                                       std::numeric_limits<double>::min()}));
    }
    r.seconds = clock.seconds();
    return r;
}

void print_campaign(std::ostream& os, const CampaignResult& r) {
    os << r.name << ": " << (r.passed() ? "ok" : "FAILED") << " trials=" << r.trials << " violations=" << r.violations
       << " worst_excess=" << r.worst_excess << " seconds=" << r.seconds << '\n';
}

}  // namespace worstpath::oracle
