#pragma once

#include <cstdint>
#include <memory>

#include "irl/offline_data.hpp"
#include "irl/reward_mapping.hpp"

namespace irl {

struct RlpConfig {
    prec_t delta = 0.1;  ///< confidence, in (0, 1)
    prec_t eps = 0.1;    ///< target accuracy
    prec_t C = 1.0;      ///< bonus constant; 0 disables pessimism
    FeedbackOption option = FeedbackOption::expert_action;
    prec_t log_cover = 1.0;  ///< log N(Theta; eps / H), see irl::log_cover

    void validate() const;
};

/// Empirical model fitted from a transition pool.
///
/// p_hat rows are normalized counts; rows of unvisited (h, s, a) are all zero.
/// Last-step rows are zero for episode data (no successor is recorded) and
/// never read since V_H = 0.
struct RlpModel {
    int horizon = 0;
    int states = 0;
    int actions = 0;
    Kernel p_hat;
    Table3<prec_t> expert_hat;           ///< pi-hat^E_h(a|s)
    Table3<std::uint8_t> expert_support; ///< expert_hat > 0
    CountTables counts;
    RlpConfig config;

    /// iota = log(H S A / delta)
    prec_t iota() const;
};

RlpModel fit_empirical(const TransitionSet& data, const RlpConfig& config);
RlpModel fit_empirical(const EpisodeDataset& dataset, const RlpConfig& config);

/// Empirical variance of `next_values` under p_hat(.|s, a): P(V^2) - (PV)^2,
/// clamped at 0; zero on all-zero rows.
prec_t empirical_variance(const RlpModel& model, int h, int s, int a, std::span<const prec_t> next_values);

/// Closed form of the per-cell bonus:
/// C min{ sqrt(L Var / n) + H L / n + (eps / H)(1 + sqrt(L / n)), H }, n = max(N, 1), L = logN * iota.
prec_t bonus_value(prec_t C, prec_t log_factor, long visits, prec_t variance, int horizon, prec_t eps);

/// Pessimism bonus b^theta as an H x S x A table.
Table3<prec_t> bonus(const RlpModel& model, const RewardParam& theta, prec_t eps);

/// r-hat = -A 1{a not in supp(pi-hat^E)} + V - P-hat V_{h+1} - b^theta.
/// Declared bound 3H + C H.
RewardTable estimated_reward(const RlpModel& model, const RewardParam& theta, prec_t eps);

/// Fits the model once and returns a mapping evaluating estimated_reward
/// lazily. The model's log-cover is taken from `thetas` at eps / H.
RewardMapping rlp_run(const TransitionSet& data, const ParamSet& thetas, RlpConfig config);
RewardMapping rlp_run(const EpisodeDataset& dataset, const ParamSet& thetas, RlpConfig config);

/// As rlp_run, but also hands back the fitted model.
std::pair<RewardMapping, std::shared_ptr<const RlpModel>> rlp_fit(const TransitionSet& data,
                                                                  const ParamSet& thetas, RlpConfig config);

} // namespace irl
