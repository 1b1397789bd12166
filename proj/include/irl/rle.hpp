#pragma once

#include <cstdint>
#include <memory>

#include "irl/explore.hpp"
#include "irl/rlp.hpp"

namespace irl {

struct RleConfig {
    std::uint64_t per_stage_episodes = 0;  ///< N; 0 selects default_exploration_budget
    std::uint64_t main_episodes = 1024;    ///< K
    prec_t delta = 0.1;
    prec_t eps = 0.1;
    prec_t C = 1.0;
    prec_t c_xi = kDefaultXiConstant;
    bool paper_faithful = false;  ///< c_xi = 1 and the uncapped N schedule

    void validate(int horizon) const;
};

/// N = ceil(sqrt(H^9 S^7 A^7 K)) with unit constant, capped at K H.
std::uint64_t default_exploration_budget(int horizon, int states, int actions, std::uint64_t main_episodes);

/// floor(max(0, min(K/4, K E_mu[d-hat_h(s,a)] - K xi / (8N) - 3 log(10 H S A / delta)))).
Table3<long> trim_target(const OccupancyOracle& oracle, const PolicyMixture& mixture, std::uint64_t main_episodes,
                         prec_t xi, std::uint64_t per_stage_episodes, prec_t delta);

/// Keeps min(target, available) samples of every (h, s, a), drawn uniformly
/// without replacement; cell (h, s, a) uses seed mix64(seed, cell index).
TransitionSet subsample(const TransitionSet& data, const Table3<long>& targets, std::uint64_t seed);

struct RleSummary {
    std::uint64_t episodes_explore = 0;
    std::uint64_t episodes_main = 0;
    prec_t trim_retention_fraction = 0.0;
    std::uint64_t per_stage_episodes = 0;
    prec_t xi = 0.0;
    bool exploration_converged = false;
};

struct RleResult {
    RewardMapping mapping;
    std::shared_ptr<const RlpModel> model;
    ExploreResult exploration;
    TransitionSet collected;
    TransitionSet trimmed;
    RleSummary summary;
};

/// Explore, collect K episodes with the behavior mixture, trim, then run RLP
/// with (delta / 10, eps / 10).
RleResult rle_run(Environment& env, const ParamSet& thetas, const RleConfig& config, std::uint64_t seed);

} // namespace irl
