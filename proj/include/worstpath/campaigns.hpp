#pragma once

#include "worstpath/env_gen.hpp"
#include "worstpath/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>

namespace worstpath::oracle {

/// Outcome of one randomized property campaign.
struct CampaignResult {
    std::string name;
    std::size_t trials = 0;
    std::size_t violations = 0;
    /// Largest observed breach of the checked bound (0 when none).
    double worst_excess = 0.0;
    double seconds = 0.0;

    bool passed() const noexcept { return trials > 0 && violations == 0; }
};

/// A generated environment with a state count drawn from [min_states, max_states].
/// Draws fresh generator seeds from `rng` until generation succeeds.
Environment random_environment(Rng& rng, std::size_t min_states, std::size_t max_states, std::size_t max_actions);

/// |B*V1 - B*V2| <= gamma |V1 - V2| (sup norms) on random value pairs.
CampaignResult contraction_campaign(std::uint64_t seed, std::size_t trials, std::size_t max_states = 200,
                                    double slack = 1e-12);

/// Value iteration from all-zeros and all-ones reaches the same fixed point.
CampaignResult fixed_point_campaign(std::uint64_t seed, std::size_t envs, double tol = 1e-9);

/// Value iteration and the greedy policy's value both match brute-force enumeration.
CampaignResult brute_force_campaign(std::uint64_t seed, std::size_t envs, double tol = 1e-9);

/// Exact reweighting never lowers a state value by more than `tol`.
CampaignResult improvement_campaign(std::uint64_t seed, std::size_t envs, std::size_t rounds = 5, double tol = 1e-9);

/// Deterministic rollouts: zero variance, and sampled, evaluated and realised-tree values coincide exactly.
CampaignResult rollout_campaign(std::uint64_t seed, std::size_t policies, std::size_t samples = 8);

void print_campaign(std::ostream& os, const CampaignResult& r);

}  // namespace worstpath::oracle
