#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "irl/rng.hpp"
#include "irl/tensor.hpp"

namespace irl {

/// Tolerance used to accept a probability row as normalized.
inline constexpr prec_t kRowSumTolerance = 1e-9;

/// Finite-horizon tabular MDP without reward.
///
/// Steps are indexed 0..H-1; step h here is step h+1 in the usual 1-based
/// notation. The value at step H is the terminal zero. The initial state is
/// deterministic.
class Mdp {
public:
    Mdp() = default;
    /// Creates an MDP with an all-zero kernel; fill rows with transition().
    Mdp(int horizon, int states, int actions, int initial_state);
    Mdp(int horizon, int states, int actions, int initial_state, Kernel transitions);

    int horizon() const { return transitions_.horizon(); }
    int states() const { return transitions_.states(); }
    int actions() const { return transitions_.actions(); }
    int initial_state() const { return initial_state_; }

    prec_t transition(int h, int s, int a, int next) const { return transitions_(h, s, a, next); }
    prec_t& transition(int h, int s, int a, int next) { return transitions_(h, s, a, next); }
    std::span<const prec_t> row(int h, int s, int a) const { return transitions_.row(h, s, a); }
    std::span<prec_t> row(int h, int s, int a) { return transitions_.row(h, s, a); }

    const Kernel& kernel() const { return transitions_; }
    Kernel& kernel() { return transitions_; }

    bool operator==(const Mdp&) const = default;

private:
    Kernel transitions_;
    int initial_state_ = 0;
};

/// Per-step state-conditional action distributions pi_h(a|s).
class Policy {
public:
    Policy() = default;
    explicit Policy(Table3<prec_t> probs) : probs_(std::move(probs)) {}

    static Policy uniform(int horizon, int states, int actions);
    /// Deterministic policy from a (H x S) action table.
    static Policy deterministic(const Table2<int>& choice, int actions);
    /// Deterministic policy selecting `action` everywhere.
    static Policy constant(int horizon, int states, int actions, int action);

    int horizon() const { return probs_.horizon(); }
    int states() const { return probs_.states(); }
    int actions() const { return probs_.actions(); }

    prec_t operator()(int h, int s, int a) const { return probs_(h, s, a); }
    prec_t& operator()(int h, int s, int a) { return probs_(h, s, a); }
    std::span<const prec_t> row(int h, int s) const { return probs_.row(h, s); }

    const Table3<prec_t>& table() const { return probs_; }

    bool is_deterministic() const;
    /// Chosen action at (h, s); only meaningful for deterministic policies.
    int action(int h, int s) const;

    bool operator==(const Policy&) const = default;

private:
    Table3<prec_t> probs_;
};

/// A reward r_h(s, a) with a declared absolute bound.
struct RewardTable {
    Table3<prec_t> r;
    prec_t declared_bound = 0.0;

    int horizon() const { return r.horizon(); }
    int states() const { return r.states(); }
    int actions() const { return r.actions(); }
    prec_t operator()(int h, int s, int a) const { return r(h, s, a); }
    prec_t& operator()(int h, int s, int a) { return r(h, s, a); }

    static RewardTable zeros(int horizon, int states, int actions) {
        return {Table3<prec_t>(horizon, states, actions, 0.0), 0.0};
    }
    /// max |r| over all entries.
    prec_t sup_norm() const;
};

/// V has H+1 rows with V[H] = 0.
struct ValueTables {
    Table2<prec_t> v;
    Table3<prec_t> q;
    Table3<prec_t> advantage;
};

struct Occupancy {
    Table3<prec_t> state_action;
    Table2<prec_t> state;
};

struct Transition {
    int h;
    int state;
    int action;
    int next_state;
    bool operator==(const Transition&) const = default;
};

using Episode = std::vector<Transition>;

/// Throws ValidationError naming the first violated row or index.
void validate_mdp(const Mdp& mdp);
void validate_policy(const Policy& policy);
/// Checks that policy and reward (when given) match the MDP's shape.
void check_shapes(const Mdp& mdp, const Policy* policy, const RewardTable* reward);

/// [P_h f](s, a) for a state function f.
prec_t expect_next(const Mdp& mdp, int h, int s, int a, std::span<const prec_t> f);

/// Backward recursion Q_h = r_h + P_h V_{h+1}, V_h = <pi_h, Q_h>.
ValueTables evaluate_policy(const Mdp& mdp, const RewardTable& reward, const Policy& policy);

/// Forward recursion from the deterministic initial state.
Occupancy occupancy(const Mdp& mdp, const Policy& policy);

struct OptimalSolution {
    Policy policy;
    ValueTables values;
};

/// Backward value iteration. The returned policy is deterministic; ties go to
/// the lowest action index.
OptimalSolution optimal_policy(const Mdp& mdp, const RewardTable& reward);

/// True iff max_{h,s,a} A^pi_h(s,a; r) <= tol, including unreachable states.
bool is_optimal(const Mdp& mdp, const RewardTable& reward, const Policy& policy, prec_t tol = 1e-9);

/// Largest advantage of `policy` anywhere; zero for an optimal policy.
prec_t max_advantage(const Mdp& mdp, const RewardTable& reward, const Policy& policy);

/// One length-H trajectory. Deterministic in the generator state.
Episode sample_episode(const Mdp& mdp, const Policy& policy, Rng& rng);
Episode sample_episode(const Mdp& mdp, const Policy& policy, std::uint64_t seed);

/// Number of deterministic policies A^(S*H), or nullopt on overflow of the cap.
std::optional<std::uint64_t> deterministic_policy_count(int horizon, int states, int actions,
                                                        std::uint64_t cap);

/// Decodes policy number `index` in [0, A^(S*H)) in mixed radix A, step-major.
Policy decode_deterministic_policy(std::uint64_t index, int horizon, int states, int actions);

} // namespace irl
