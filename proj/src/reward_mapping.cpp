#include "irl/reward_mapping.hpp"

#include <cmath>

namespace irl {

void validate_param(const RewardParam& theta) {
    const int H = theta.horizon(), S = theta.states(), A = theta.actions();
    if (theta.advantages.horizon() != H || theta.advantages.states() != S)
        throw ValidationError("RewardParam: V and A shapes disagree");
    for (int h = 0; h < H; ++h) {
        const prec_t bound = static_cast<prec_t>(H - h);
        for (int s = 0; s < S; ++s) {
            if (!(std::abs(theta.values(h, s)) <= bound))
                throw ValidationError("RewardParam: |V[" + std::to_string(h) + "][" + std::to_string(s) +
                                      "]| exceeds " + std::to_string(bound));
            for (int a = 0; a < A; ++a) {
                const prec_t x = theta.advantages(h, s, a);
                if (!(x >= 0.0 && x <= bound))
                    throw ValidationError("RewardParam: A[" + std::to_string(h) + "][" + std::to_string(s) + "][" +
                                          std::to_string(a) + "] outside [0, " + std::to_string(bound) + "]");
            }
        }
    }
}

ParamSet ParamSet::finite(std::vector<RewardParam> members) {
    if (members.empty()) throw ValidationError("ParamSet: finite list must be nonempty");
    ParamSet out;
    out.kind = Kind::finite_list;
    out.horizon = members.front().horizon();
    out.states = members.front().states();
    out.actions = members.front().actions();
    out.members = std::move(members);
    return out;
}

ParamSet ParamSet::full_box(int horizon, int states, int actions) {
    ParamSet out;
    out.kind = Kind::full_box;
    out.horizon = horizon;
    out.states = states;
    out.actions = actions;
    return out;
}

prec_t log_cover(const ParamSet& theta_set, prec_t eps) {
    if (!(eps > 0.0)) throw ValidationError("log_cover: eps must be positive");
    prec_t raw = 0.0;
    if (theta_set.kind == ParamSet::Kind::finite_list) {
        if (theta_set.members.empty()) throw ValidationError("log_cover: empty parameter list");
        raw = std::log(static_cast<prec_t>(theta_set.members.size()));
    } else {
        raw = theta_set.states * std::log(3.0 * theta_set.horizon / eps);
    }
    return std::max(raw, 1.0);
}

Table3<std::uint8_t> policy_support(const Policy& policy) {
    Table3<std::uint8_t> mask(policy.horizon(), policy.states(), policy.actions(), 0);
    for (int h = 0; h < policy.horizon(); ++h)
        for (int s = 0; s < policy.states(); ++s)
            for (int a = 0; a < policy.actions(); ++a) mask(h, s, a) = policy(h, s, a) > 0.0 ? 1 : 0;
    return mask;
}

RewardTable ground_truth_reward(const Mdp& mdp, const Table3<std::uint8_t>& support, const RewardParam& theta) {
    const int H = mdp.horizon(), S = mdp.states(), A = mdp.actions();
    if (theta.horizon() != H || theta.states() != S || theta.actions() != A || support.horizon() != H ||
        support.states() != S || support.actions() != A)
        throw ValidationError("ground_truth_reward: shape mismatch");
    validate_param(theta);

    RewardTable out{Table3<prec_t>(H, S, A, 0.0), 3.0 * H};
    const std::vector<prec_t> terminal(static_cast<std::size_t>(S), 0.0);
    for (int h = 0; h < H; ++h) {
        const auto next_v = h + 1 < H ? theta.values.row(h + 1) : std::span<const prec_t>(terminal);
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) {
                const prec_t penalty = support(h, s, a) ? 0.0 : theta.advantages(h, s, a);
                out(h, s, a) = -penalty + theta.values(h, s) - expect_next(mdp, h, s, a, next_v);
            }
    }
    return out;
}

RewardTable ground_truth_reward(const Mdp& mdp, const Policy& expert, const RewardParam& theta) {
    check_shapes(mdp, &expert, nullptr);
    return ground_truth_reward(mdp, policy_support(expert), theta);
}

RewardParam sample_theta(int horizon, int states, int actions, std::uint64_t seed, prec_t scale) {
    if (!(scale >= 0.0 && scale <= 1.0)) throw ValidationError("sample_theta: scale must lie in [0, 1]");
    Rng rng(seed);
    RewardParam theta = RewardParam::zeros(horizon, states, actions);
    for (int h = 0; h < horizon; ++h) {
        const prec_t bound = scale * (horizon - h);
        for (int s = 0; s < states; ++s) {
            theta.values(h, s) = rng.uniform(-bound, bound);
            for (int a = 0; a < actions; ++a) theta.advantages(h, s, a) = rng.uniform(0.0, bound);
        }
    }
    return theta;
}

std::vector<RewardParam> sample_thetas(int horizon, int states, int actions, int count, std::uint64_t seed,
                                       prec_t scale) {
    std::vector<RewardParam> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        out.push_back(sample_theta(horizon, states, actions, mix64(seed, static_cast<std::uint64_t>(i)), scale));
    return out;
}

bool check_feasible_bounded(const Mdp& mdp, const Policy& expert, const RewardTable& reward) {
    return is_optimal(mdp, reward, expert, 1e-9) && reward.sup_norm() <= 3.0 * mdp.horizon();
}

bool check_feasible_bounded(const Mdp& mdp, const Policy& expert, const RewardParam& theta) {
    return check_feasible_bounded(mdp, expert, ground_truth_reward(mdp, expert, theta));
}

RewardMapping ground_truth_mapping(const Mdp& mdp, const Policy& expert) {
    check_shapes(mdp, &expert, nullptr);
    auto model = std::make_shared<const Mdp>(mdp);
    auto support = std::make_shared<const Table3<std::uint8_t>>(policy_support(expert));
    return RewardMapping(RewardMapping::Origin::ground_truth,
                         [model, support](const RewardParam& theta) {
                             return ground_truth_reward(*model, *support, theta);
                         });
}

} // namespace irl
