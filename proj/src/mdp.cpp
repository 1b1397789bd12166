#include "irl/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace irl {

namespace {

std::string where(int h, int s, int a) {
    std::ostringstream os;
    os << "(h=" << h << ", s=" << s << ", a=" << a << ")";
    return os.str();
}

} // namespace

Mdp::Mdp(int horizon, int states, int actions, int initial_state)
    : transitions_(horizon, states, actions), initial_state_(initial_state) {}

Mdp::Mdp(int horizon, int states, int actions, int initial_state, Kernel transitions)
    : transitions_(std::move(transitions)), initial_state_(initial_state) {
    if (transitions_.horizon() != horizon || transitions_.states() != states || transitions_.actions() != actions)
        throw ValidationError("Mdp: kernel shape does not match (H, S, A)");
}

Policy Policy::uniform(int horizon, int states, int actions) {
    return Policy(Table3<prec_t>(horizon, states, actions, 1.0 / actions));
}

Policy Policy::deterministic(const Table2<int>& choice, int actions) {
    Table3<prec_t> probs(choice.rows(), choice.cols(), actions, 0.0);
    for (int h = 0; h < choice.rows(); ++h)
        for (int s = 0; s < choice.cols(); ++s) {
            const int a = choice(h, s);
            if (a < 0 || a >= actions) throw ValidationError("Policy::deterministic: action out of range");
            probs(h, s, a) = 1.0;
        }
    return Policy(std::move(probs));
}

Policy Policy::constant(int horizon, int states, int actions, int action) {
    return deterministic(Table2<int>(horizon, states, action), actions);
}

bool Policy::is_deterministic() const {
    for (int h = 0; h < horizon(); ++h)
        for (int s = 0; s < states(); ++s) {
            int ones = 0;
            for (prec_t p : row(h, s)) {
                if (p == 1.0)
                    ++ones;
                else if (p != 0.0)
                    return false;
            }
            if (ones != 1) return false;
        }
    return true;
}

int Policy::action(int h, int s) const {
    const auto r = row(h, s);
    return static_cast<int>(std::max_element(r.begin(), r.end()) - r.begin());
}

prec_t RewardTable::sup_norm() const {
    prec_t m = 0.0;
    for (prec_t x : r.data()) m = std::max(m, std::abs(x));
    return m;
}

void validate_mdp(const Mdp& mdp) {
    if (mdp.horizon() <= 0 || mdp.states() <= 0 || mdp.actions() <= 0)
        throw ValidationError("validate_mdp: H, S and A must be positive");
    if (mdp.initial_state() < 0 || mdp.initial_state() >= mdp.states())
        throw ValidationError("validate_mdp: initial state out of range");
    for (int h = 0; h < mdp.horizon(); ++h)
        for (int s = 0; s < mdp.states(); ++s)
            for (int a = 0; a < mdp.actions(); ++a) {
                prec_t sum = 0.0;
                const auto row = mdp.row(h, s, a);
                for (std::size_t next = 0; next < row.size(); ++next) {
                    if (!(row[next] >= 0.0) || !std::isfinite(row[next]))
                        throw ValidationError("validate_mdp: negative or non-finite entry at " + where(h, s, a) +
                                              " -> " + std::to_string(next));
                    sum += row[next];
                }
                if (std::abs(sum - 1.0) > kRowSumTolerance)
                    throw ValidationError("validate_mdp: row " + where(h, s, a) + " sums to " +
                                          std::to_string(sum));
            }
}

void validate_policy(const Policy& policy) {
    for (int h = 0; h < policy.horizon(); ++h)
        for (int s = 0; s < policy.states(); ++s) {
            prec_t sum = 0.0;
            for (prec_t p : policy.row(h, s)) {
                if (!(p >= 0.0)) throw ValidationError("validate_policy: negative probability at " + where(h, s, 0));
                sum += p;
            }
            if (std::abs(sum - 1.0) > kRowSumTolerance)
                throw ValidationError("validate_policy: row (h=" + std::to_string(h) + ", s=" + std::to_string(s) +
                                      ") sums to " + std::to_string(sum));
        }
}

void check_shapes(const Mdp& mdp, const Policy* policy, const RewardTable* reward) {
    auto matches = [&](int h, int s, int a) {
        return h == mdp.horizon() && s == mdp.states() && a == mdp.actions();
    };
    if (policy && !matches(policy->horizon(), policy->states(), policy->actions()))
        throw ValidationError("shape mismatch: policy does not match MDP");
    if (reward && !matches(reward->horizon(), reward->states(), reward->actions()))
        throw ValidationError("shape mismatch: reward does not match MDP");
}

prec_t expect_next(const Mdp& mdp, int h, int s, int a, std::span<const prec_t> f) {
    const auto row = mdp.row(h, s, a);
    prec_t acc = 0.0;
    for (std::size_t next = 0; next < row.size(); ++next) acc += row[next] * f[next];
    return acc;
}

ValueTables evaluate_policy(const Mdp& mdp, const RewardTable& reward, const Policy& policy) {
    check_shapes(mdp, &policy, &reward);
    const int H = mdp.horizon(), S = mdp.states(), A = mdp.actions();
    ValueTables out{Table2<prec_t>(H + 1, S, 0.0), Table3<prec_t>(H, S, A, 0.0), Table3<prec_t>(H, S, A, 0.0)};
    for (int h = H - 1; h >= 0; --h) {
        const auto next_v = out.v.row(h + 1);
        for (int s = 0; s < S; ++s) {
            prec_t v = 0.0;
            for (int a = 0; a < A; ++a) {
                const prec_t q = reward(h, s, a) + expect_next(mdp, h, s, a, next_v);
                out.q(h, s, a) = q;
                v += policy(h, s, a) * q;
            }
            out.v(h, s) = v;
            for (int a = 0; a < A; ++a) out.advantage(h, s, a) = out.q(h, s, a) - v;
        }
    }
    return out;
}

Occupancy occupancy(const Mdp& mdp, const Policy& policy) {
    check_shapes(mdp, &policy, nullptr);
    const int H = mdp.horizon(), S = mdp.states(), A = mdp.actions();
    Occupancy occ{Table3<prec_t>(H, S, A, 0.0), Table2<prec_t>(H, S, 0.0)};
    occ.state(0, mdp.initial_state()) = 1.0;
    for (int h = 0; h < H; ++h) {
        for (int s = 0; s < S; ++s) {
            const prec_t ds = occ.state(h, s);
            if (ds == 0.0) continue;
            for (int a = 0; a < A; ++a) occ.state_action(h, s, a) = ds * policy(h, s, a);
        }
        if (h + 1 == H) break;
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) {
                const prec_t dsa = occ.state_action(h, s, a);
                if (dsa == 0.0) continue;
                const auto row = mdp.row(h, s, a);
                for (int next = 0; next < S; ++next) occ.state(h + 1, next) += dsa * row[next];
            }
    }
    return occ;
}

OptimalSolution optimal_policy(const Mdp& mdp, const RewardTable& reward) {
    check_shapes(mdp, nullptr, &reward);
    const int H = mdp.horizon(), S = mdp.states(), A = mdp.actions();
    Table2<int> choice(H, S, 0);
    ValueTables vt{Table2<prec_t>(H + 1, S, 0.0), Table3<prec_t>(H, S, A, 0.0), Table3<prec_t>(H, S, A, 0.0)};
    for (int h = H - 1; h >= 0; --h) {
        const auto next_v = vt.v.row(h + 1);
        for (int s = 0; s < S; ++s) {
            int best = 0;
            prec_t best_q = -std::numeric_limits<prec_t>::infinity();
            for (int a = 0; a < A; ++a) {
                const prec_t q = reward(h, s, a) + expect_next(mdp, h, s, a, next_v);
                vt.q(h, s, a) = q;
                if (q > best_q) {
                    best_q = q;
                    best = a;
                }
            }
            choice(h, s) = best;
            vt.v(h, s) = best_q;
            for (int a = 0; a < A; ++a) vt.advantage(h, s, a) = vt.q(h, s, a) - best_q;
        }
    }
    return {Policy::deterministic(choice, A), std::move(vt)};
}

prec_t max_advantage(const Mdp& mdp, const RewardTable& reward, const Policy& policy) {
    const auto vt = evaluate_policy(mdp, reward, policy);
    prec_t worst = -std::numeric_limits<prec_t>::infinity();
    for (prec_t x : vt.advantage.data()) worst = std::max(worst, x);
    return worst;
}

bool is_optimal(const Mdp& mdp, const RewardTable& reward, const Policy& policy, prec_t tol) {
    return max_advantage(mdp, reward, policy) <= tol;
}

Episode sample_episode(const Mdp& mdp, const Policy& policy, Rng& rng) {
    Episode ep;
    ep.reserve(static_cast<std::size_t>(mdp.horizon()));
    int s = mdp.initial_state();
    for (int h = 0; h < mdp.horizon(); ++h) {
        const int a = rng.categorical(policy.row(h, s));
        const int next = rng.categorical(mdp.row(h, s, a));
        ep.push_back({h, s, a, next});
        s = next;
    }
    return ep;
}

Episode sample_episode(const Mdp& mdp, const Policy& policy, std::uint64_t seed) {
    Rng rng(seed);
    return sample_episode(mdp, policy, rng);
}

std::optional<std::uint64_t> deterministic_policy_count(int horizon, int states, int actions, std::uint64_t cap) {
    std::uint64_t count = 1;
    const long cells = static_cast<long>(horizon) * states;
    for (long i = 0; i < cells; ++i) {
        if (count > cap / static_cast<std::uint64_t>(actions)) return std::nullopt;
        count *= static_cast<std::uint64_t>(actions);
    }
    if (count > cap) return std::nullopt;
    return count;
}

Policy decode_deterministic_policy(std::uint64_t index, int horizon, int states, int actions) {
    Table2<int> choice(horizon, states, 0);
    for (int h = 0; h < horizon; ++h)
        for (int s = 0; s < states; ++s) {
            choice(h, s) = static_cast<int>(index % static_cast<std::uint64_t>(actions));
            index /= static_cast<std::uint64_t>(actions);
        }
    return Policy::deterministic(choice, actions);
}

} // namespace irl
