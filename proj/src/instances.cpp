#include "irl/instances.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace irl {

IrlProblem random_mdp(int horizon, int states, int actions, std::uint64_t seed, prec_t concentration) {
    if (horizon <= 0 || states <= 0 || actions <= 0) throw ValidationError("random_mdp: sizes must be positive");
    if (!(concentration > 0.0)) throw ValidationError("random_mdp: concentration must be positive");
    Rng rng(mix64(seed, 0));
    std::gamma_distribution<prec_t> gamma(concentration, 1.0);
    Mdp mdp(horizon, states, actions, 0);
    for (int h = 0; h < horizon; ++h)
        for (int s = 0; s < states; ++s)
            for (int a = 0; a < actions; ++a) {
                auto row = mdp.row(h, s, a);
                prec_t total = 0.0;
                for (prec_t& p : row) total += (p = gamma(rng.engine()));
                if (total <= 0.0) {
                    std::fill(row.begin(), row.end(), 0.0);
                    row[static_cast<std::size_t>(rng.index(states))] = 1.0;
                } else {
                    for (prec_t& p : row) p /= total;
                }
            }

    Rng reward_rng(mix64(seed, 1));
    RewardTable reward = RewardTable::zeros(horizon, states, actions);
    reward.declared_bound = 1.0;
    for (prec_t& x : reward.r.data()) x = reward_rng.uniform(-1.0, 1.0);
    Policy expert = optimal_policy(mdp, reward).policy;
    return {std::move(mdp), std::move(expert)};
}

Policy random_stochastic_expert(int horizon, int states, int actions, std::uint64_t seed, int max_support) {
    max_support = std::clamp(max_support, 1, actions);
    Rng rng(seed);
    Table3<prec_t> probs(horizon, states, actions, 0.0);
    std::vector<int> order(static_cast<std::size_t>(actions));
    for (int h = 0; h < horizon; ++h)
        for (int s = 0; s < states; ++s) {
            std::iota(order.begin(), order.end(), 0);
            std::shuffle(order.begin(), order.end(), rng.engine());
            const int size = 1 + rng.index(max_support);
            for (int i = 0; i < size; ++i) probs(h, s, order[static_cast<std::size_t>(i)]) = 1.0 / size;
        }
    return Policy(std::move(probs));
}

Policy random_full_support_policy(int horizon, int states, int actions, std::uint64_t seed) {
    Rng rng(seed);
    Table3<prec_t> probs(horizon, states, actions, 0.0);
    for (int h = 0; h < horizon; ++h)
        for (int s = 0; s < states; ++s) {
            auto row = probs.row(h, s);
            prec_t total = 0.0;
            for (prec_t& p : row) total += (p = 0.1 + rng.uniform());
            for (prec_t& p : row) p /= total;
        }
    return Policy(std::move(probs));
}

Policy random_deterministic_policy(int horizon, int states, int actions, std::uint64_t seed) {
    Rng rng(seed);
    Table2<int> choice(horizon, states, 0);
    for (int& a : choice.data()) a = rng.index(actions);
    return Policy::deterministic(choice, actions);
}

int packing_distance(const SignVector& w, const SignVector& v) {
    int total = 0;
    for (std::size_t i = 0; i < w.size(); ++i) total += (w[i] - v[i]) * (w[i] - v[i]);
    return total;
}

PackingSet packing_set(int states, int count, std::uint64_t seed, std::uint64_t max_tries) {
    if (states < 8 || states % 2 != 0) throw ValidationError("packing_set: S must be even and at least 8");
    if (count < 1) throw ValidationError("packing_set: count must be positive");
    Rng rng(seed);
    PackingSet out;
    SignVector base(static_cast<std::size_t>(states), 1);
    std::fill(base.begin() + states / 2, base.end(), -1);
    // Distances are multiples of 4; compare 8 d >= S to stay in integers.
    while (static_cast<int>(out.members.size()) < count && out.tries < max_tries) {
        ++out.tries;
        SignVector candidate = base;
        std::shuffle(candidate.begin(), candidate.end(), rng.engine());
        const bool far = std::all_of(out.members.begin(), out.members.end(), [&](const SignVector& m) {
            return 8 * packing_distance(candidate, m) >= states;
        });
        if (far) out.members.push_back(std::move(candidate));
    }
    out.complete = static_cast<int>(out.members.size()) == count;
    return out;
}

const SignVector& HardInstanceSpec::perturbation(int h, int i, int k) const {
    return w[(static_cast<std::size_t>(h) * this->k() + i) * actions + k];
}

void HardInstanceSpec::validate() const {
    if (horizon < 1 || states < 1 || actions < 1) throw ValidationError("HardInstanceSpec: sizes must be positive");
    if (!(eps_prime >= 0.0 && eps_prime <= 0.5)) throw ValidationError("HardInstanceSpec: eps_prime must lie in [0, 1/2]");
    if (w.size() != static_cast<std::size_t>(horizon) * k() * actions)
        throw ValidationError("HardInstanceSpec: w must have H * min(S, A) * A slices");
    for (const auto& slice : w) {
        if (slice.size() != static_cast<std::size_t>(states)) throw ValidationError("HardInstanceSpec: slice length != S");
        int sum = 0;
        for (int x : slice) {
            if (x != 1 && x != -1) throw ValidationError("HardInstanceSpec: entries must be +-1");
            sum += x;
        }
        if (sum != 0) throw ValidationError("HardInstanceSpec: slice does not sum to zero");
    }
    if (!(c_star >= 2.0)) throw ValidationError("HardInstanceSpec: C* must be at least 2");
    if (i_star < 0 || i_star >= k()) throw ValidationError("HardInstanceSpec: i_star out of range");
}

HardInstanceSpec make_hard_spec(int horizon, int states, int actions, prec_t eps_prime, prec_t c_star, int i_star,
                                const std::vector<SignVector>& pool, std::uint64_t seed) {
    if (pool.empty()) throw ValidationError("make_hard_spec: empty perturbation pool");
    HardInstanceSpec spec;
    spec.horizon = horizon;
    spec.states = states;
    spec.actions = actions;
    spec.eps_prime = eps_prime;
    spec.c_star = c_star;
    spec.i_star = i_star;
    Rng rng(seed);
    const std::size_t slices = static_cast<std::size_t>(horizon) * spec.k() * actions;
    for (std::size_t i = 0; i < slices; ++i) spec.w.push_back(pool[static_cast<std::size_t>(rng.index(static_cast<int>(pool.size())))]);
    spec.validate();
    return spec;
}

namespace {

void spread(std::span<prec_t> row, int first, int count) {
    for (int j = 0; j < count; ++j) row[static_cast<std::size_t>(first + j)] = 1.0 / count;
}

// Rows built from (1 +- eps') / S sum to one exactly when S is a power of
// two and eps' is dyadic; otherwise renormalize (adjustment below 1e-15).
void normalize(std::span<prec_t> row) {
    prec_t total = 0.0;
    for (prec_t p : row) total += p;
    if (total != 1.0)
        for (prec_t& p : row) p /= total;
}

} // namespace

// Reading of the construction (stage = step + 1):
//  * start, a_0: self loop for stages 1..H, uniform over s_1..s_S afterwards;
//    a_i (i <= K) moves to s_i; a_k (k > K) spreads uniformly over s_1..s_S.
//  * s_i at stages 2..H+1 under a_k (i <= K, k >= 1) moves to s-bar_j with
//    probability (1 + eps' w_{stage-1}(i, j, k)) / S; every other (stage,
//    middle state, action) spreads uniformly over s-bar.
//  * s-bar_j is absorbing.
// The s_root state of the source construction has no transitions and is
// omitted, which leaves 2S + 1 states.
IrlProblem hard_online(const HardInstanceSpec& spec) {
    spec.validate();
    const int H = spec.horizon, S = spec.states, A = spec.actions, K = spec.k();
    const int steps = 2 * H + 2, n_states = 2 * S + 1, n_actions = A + 1;
    const int start = 0, middle = 1, bar = S + 1;
    Mdp mdp(steps, n_states, n_actions, start);

    for (int t = 0; t < steps; ++t) {
        const int stage = t + 1;
        for (int a = 0; a < n_actions; ++a) {
            auto row = mdp.row(t, start, a);
            if (a == 0) {
                if (stage <= H)
                    row[start] = 1.0;
                else
                    spread(row, middle, S);
            } else if (a <= K) {
                row[static_cast<std::size_t>(middle + a - 1)] = 1.0;
            } else {
                spread(row, middle, S);
            }
        }
        for (int i = 0; i < S; ++i)
            for (int a = 0; a < n_actions; ++a) {
                auto row = mdp.row(t, middle + i, a);
                const bool perturbed = stage >= 2 && stage <= H + 1 && i < K && a >= 1;
                if (!perturbed) {
                    spread(row, bar, S);
                    continue;
                }
                const SignVector& w = spec.perturbation(stage - 2, i, a - 1);
                for (int j = 0; j < S; ++j)
                    row[static_cast<std::size_t>(bar + j)] = (1.0 + spec.eps_prime * w[static_cast<std::size_t>(j)]) / S;
                normalize(row);
            }
        for (int j = 0; j < S; ++j)
            for (int a = 0; a < n_actions; ++a) mdp.transition(t, bar + j, a, bar + j) = 1.0;
    }
    validate_mdp(mdp);
    return {std::move(mdp), Policy::constant(steps, n_states, n_actions, 0)};
}

HardOffline hard_offline(const HardInstanceSpec& spec) {
    auto problem = hard_online(spec);
    const int H = spec.horizon, K = spec.k();
    const int steps = problem.mdp.horizon(), n_states = problem.mdp.states(), n_actions = problem.mdp.actions();
    const int start = 0, distinguished = 1 + spec.i_star;

    Table3<prec_t> behavior(steps, n_states, n_actions, 0.0);
    Table3<prec_t> evaluation(steps, n_states, n_actions, 0.0);
    for (int t = 0; t < steps; ++t)
        for (int s = 0; s < n_states; ++s) {
            behavior(t, s, 0) = 1.0;
            evaluation(t, s, 0) = 1.0;
        }

    // Stage H: behavior spreads over a_1..a_K, evaluation commits to a_{i*}.
    const int stage_h = H - 1;
    behavior(stage_h, start, 0) = 0.0;
    evaluation(stage_h, start, 0) = 0.0;
    for (int i = 1; i <= K; ++i) behavior(stage_h, start, i) = 1.0 / K;
    evaluation(stage_h, start, distinguished) = 1.0;

    // Stage H + 1: behavior tries a_1 at s_{i*} with probability 1 / C*.
    const int stage_next = H;
    behavior(stage_next, distinguished, 0) = 1.0 - 1.0 / spec.c_star;
    behavior(stage_next, distinguished, 1) = 1.0 / spec.c_star;
    evaluation(stage_next, distinguished, 0) = 0.0;
    evaluation(stage_next, distinguished, 1) = 1.0;

    return {std::move(problem.mdp), std::move(problem.expert), Policy(std::move(behavior)),
            Policy(std::move(evaluation))};
}

} // namespace irl
