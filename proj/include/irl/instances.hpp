#pragma once

#include <cstdint>
#include <vector>

#include "irl/mdp.hpp"

namespace irl {

struct IrlProblem {
    Mdp mdp;
    Policy expert;
};

/// Random MDP with Dirichlet(concentration) successor rows and a
/// deterministic expert that is optimal for a uniform [-1, 1] reward.
/// The expert is therefore 1-well-posed.
IrlProblem random_mdp(int horizon, int states, int actions, std::uint64_t seed, prec_t concentration = 1.0);

/// Expert that is uniform over a random nonempty subset of at most
/// `max_support` actions at every (h, s).
Policy random_stochastic_expert(int horizon, int states, int actions, std::uint64_t seed, int max_support);

/// Random policy with every entry positive.
Policy random_full_support_policy(int horizon, int states, int actions, std::uint64_t seed);

/// Random deterministic policy.
Policy random_deterministic_policy(int horizon, int states, int actions, std::uint64_t seed);

using SignVector = std::vector<int>;

struct PackingSet {
    std::vector<SignVector> members;
    bool complete = false;  ///< false when max_tries ran out before `count` members
    std::uint64_t tries = 0;
};

/// Squared distance sum_i (w_i - v_i)^2.
int packing_distance(const SignVector& w, const SignVector& v);

/// Rejection-samples balanced +-1 vectors with pairwise squared distance
/// >= S / 8. Requires even S >= 8.
PackingSet packing_set(int states, int count, std::uint64_t seed, std::uint64_t max_tries = 100'000);

/// Hard-instance family indexed by perturbations w.
///
/// Layout (base sizes H, S, A; K = min(S, A)):
///  * states: 0 = start, 1..S = s_1..s_S, S+1..2S = absorbing s-bar_1..s-bar_S
///  * actions: 0 = a_0, 1..A = a_1..a_A
///  * steps: 2H + 2, step t here is stage t + 1 of the 1-based construction
/// Perturbation w(h, i, k) is a balanced sign vector over s-bar, for stage
/// index h in [0, H), middle state i in [0, K) and action k in [0, A)
/// (action a_{k+1}). See hard_online for the transition reading.
struct HardInstanceSpec {
    int horizon = 4;
    int states = 4;
    int actions = 2;
    prec_t eps_prime = 0.25;
    std::vector<SignVector> w;  ///< size H * K * A, flattened (h, i, k)
    prec_t c_star = 2.0;
    int i_star = 0;             ///< distinguished middle state in [0, K)

    int k() const { return std::min(states, actions); }
    const SignVector& perturbation(int h, int i, int k) const;
    void validate() const;
};

/// Spec whose perturbation slices are drawn uniformly from `pool`.
HardInstanceSpec make_hard_spec(int horizon, int states, int actions, prec_t eps_prime, prec_t c_star, int i_star,
                                const std::vector<SignVector>& pool, std::uint64_t seed);

struct HardOffline {
    Mdp mdp;
    Policy expert;
    Policy behavior;
    Policy evaluation;
};

/// Online hard instance: 2S + 1 states, A + 1 actions, 2H + 2 steps.
IrlProblem hard_online(const HardInstanceSpec& spec);

/// Offline variant with the behavior/evaluation pair of bounded concentrability.
HardOffline hard_offline(const HardInstanceSpec& spec);

} // namespace irl
