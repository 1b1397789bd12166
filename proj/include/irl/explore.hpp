#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "irl/environment.hpp"
#include "irl/mdp.hpp"

namespace irl {

/// Occupancy estimates through truncated empirical kernels.
///
/// kernel(h, s, a, .) holds the empirical successor distribution of stage h
/// when that stage's batch visited (s, a) more than `xi` times, and is zero
/// otherwise. Missing mass is the mass an augmented absorbing state receives.
struct OccupancyOracle {
    int horizon = 0;
    int states = 0;
    int actions = 0;
    std::vector<prec_t> initial;  ///< empirical initial-state distribution
    Kernel kernel;
    Table3<long> visits;          ///< per-stage batch counts N_h(s, a)
    prec_t xi = 0.0;
    std::uint64_t per_stage_episodes = 0;

    /// Exact, untruncated oracle of a known MDP.
    static OccupancyOracle exact(const Mdp& mdp);
};

/// Distribution over deterministic policies. Executing a mixture draws one
/// atom per episode, which makes occupancies linear in the weights.
struct PolicyMixture {
    std::vector<Policy> atoms;
    std::vector<prec_t> weights;

    static PolicyMixture single(Policy policy);
    void validate() const;
    const Policy& draw(Rng& rng) const;
    /// Adds `alpha` weight on `atom`, scaling the rest by 1 - alpha; merges
    /// equal atoms.
    void blend(const Policy& atom, prec_t alpha);
};

/// d-hat^pi_h(s, a), H x S x A. May sum to less than one per step.
Table3<prec_t> occupancy_hat(const OccupancyOracle& oracle, const Policy& policy);
Table3<prec_t> occupancy_hat(const OccupancyOracle& oracle, const PolicyMixture& mixture);

/// Which occupancy steps the Frank-Wolfe objective covers.
struct FwMode {
    std::optional<int> stage;  ///< per-stage when set, final (all steps) otherwise

    static FwMode per_stage(int h) { return {h}; }
    static FwMode final_mode() { return {std::nullopt}; }
    bool covers(int h) const { return !stage || *stage == h; }
    /// M = S A per stage, H S A final.
    prec_t cells(int horizon, int states, int actions) const {
        return static_cast<prec_t>(states) * actions * (stage ? 1 : horizon);
    }
};

/// MDP over S + 1 states (index S absorbing) whose optimal policy maximizes
/// the g-functional against `mixture_occ`.
struct AugmentedProblem {
    Mdp mdp;
    RewardTable reward;
};

AugmentedProblem build_augmented(const OccupancyOracle& oracle, FwMode mode, const Table3<prec_t>& mixture_occ,
                                 std::uint64_t episodes);
AugmentedProblem build_augmented(const OccupancyOracle& oracle, FwMode mode, const PolicyMixture& mixture,
                                 std::uint64_t episodes);

/// g(pi, mu) = sum over covered (h, s, a) of (1/(KH) + d^pi) / (1/(KH) + E_mu d).
prec_t g_functional(const Table3<prec_t>& policy_occ, const Table3<prec_t>& mixture_occ, FwMode mode,
                    std::uint64_t episodes);

/// sum over covered (h, s, a) of log(1/(KH) + E_mu d).
prec_t fw_objective(const Table3<prec_t>& mixture_occ, FwMode mode, std::uint64_t episodes);

/// Frank-Wolfe step size ((g / M) - 1) / (g - 1).
prec_t fw_step_size(prec_t g, prec_t cells);

struct FwResult {
    PolicyMixture mixture;
    int iterations = 0;
    int max_iterations = 0;
    bool converged = false;       ///< exited through g <= 2M
    prec_t final_g = 0.0;         ///< g of the last argmax policy
    std::vector<prec_t> objective;  ///< objective after each mixture update, starting at mu^(0)
};

FwResult fw_solve(const OccupancyOracle& oracle, std::uint64_t episodes, FwMode mode);

/// c_xi H^3 S^3 A^3 log(10 H S A / delta).
prec_t exploration_threshold(int horizon, int states, int actions, prec_t delta, prec_t c_xi);

inline constexpr prec_t kDefaultXiConstant = 1e-6;

struct ExploreConfig {
    std::uint64_t per_stage_episodes = 0;  ///< N
    std::uint64_t main_episodes = 0;       ///< K, sets the 1/(KH) smoothing
    prec_t xi = 0.0;
};

struct ExploreResult {
    OccupancyOracle oracle;
    PolicyMixture behavior;
    std::vector<FwResult> stage_runs;
    FwResult final_run;
    std::uint64_t episodes = 0;  ///< N initial draws + (H - 1) N stage batches
    std::vector<prec_t> truncation_fraction;  ///< per stage, share of (s, a) with N_h(s, a) <= xi
    bool degenerate = false;                  ///< every kernel row truncated
};

ExploreResult explore_run(Environment& env, const ExploreConfig& config, std::uint64_t seed);

/// Max over `policies` of the final-mode g against `mixture`.
prec_t coverage_certificate(const OccupancyOracle& oracle, const PolicyMixture& mixture,
                            const std::vector<Policy>& policies, std::uint64_t episodes);

} // namespace irl
