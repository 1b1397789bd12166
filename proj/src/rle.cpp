#include "irl/rle.hpp"

#include <algorithm>
#include <cmath>

namespace irl {

void RleConfig::validate(int horizon) const {
    if (main_episodes == 0) throw ValidationError("RleConfig: K must be positive");
    if (per_stage_episodes > main_episodes * static_cast<std::uint64_t>(horizon))
        throw ValidationError("RleConfig: N must not exceed K H");
    if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("RleConfig: delta must lie in (0, 1)");
    if (!(eps > 0.0)) throw ValidationError("RleConfig: eps must be positive");
    if (!(C >= 0.0) || !(c_xi >= 0.0)) throw ValidationError("RleConfig: constants must be nonnegative");
}

std::uint64_t default_exploration_budget(int horizon, int states, int actions, std::uint64_t main_episodes) {
    const prec_t raw = std::sqrt(std::pow(horizon, 9.0) * std::pow(states, 7.0) * std::pow(actions, 7.0) *
                                 static_cast<prec_t>(main_episodes));
    const prec_t cap = static_cast<prec_t>(main_episodes) * horizon;
    return static_cast<std::uint64_t>(std::max(1.0, std::min(std::ceil(raw), cap)));
}

Table3<long> trim_target(const OccupancyOracle& oracle, const PolicyMixture& mixture, std::uint64_t main_episodes,
                         prec_t xi, std::uint64_t per_stage_episodes, prec_t delta) {
    if (per_stage_episodes == 0) throw ValidationError("trim_target: N must be positive");
    const int H = oracle.horizon, S = oracle.states, A = oracle.actions;
    const prec_t K = static_cast<prec_t>(main_episodes);
    const prec_t slack = K * xi / (8.0 * static_cast<prec_t>(per_stage_episodes)) +
                         3.0 * std::log(10.0 * H * S * A / delta);
    const auto expected = occupancy_hat(oracle, mixture);
    Table3<long> out(H, S, A, 0);
    for (std::size_t i = 0; i < out.data().size(); ++i) {
        const prec_t raw = std::min(K / 4.0, K * expected.data()[i] - slack);
        out.data()[i] = static_cast<long>(std::floor(std::max(0.0, raw)));
    }
    return out;
}

TransitionSet subsample(const TransitionSet& data, const Table3<long>& targets, std::uint64_t seed) {
    const int H = data.horizon, S = data.states, A = data.actions;
    if (targets.horizon() != H || targets.states() != S || targets.actions() != A)
        throw ValidationError("subsample: target shape mismatch");

    std::vector<std::vector<std::size_t>> cells(static_cast<std::size_t>(H) * S * A);
    auto cell_of = [&](const Sample& x) { return (static_cast<std::size_t>(x.h) * S + x.state) * A + x.action; };
    for (std::size_t i = 0; i < data.samples.size(); ++i) cells[cell_of(data.samples[i])].push_back(i);

    std::vector<std::size_t> kept;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const auto& pool = cells[c];
        const std::size_t quota =
            std::min(pool.size(), static_cast<std::size_t>(std::max<long>(0, targets.data()[c])));
        if (quota == pool.size()) {
            kept.insert(kept.end(), pool.begin(), pool.end());
            continue;
        }
        Rng rng(mix64(seed, c));
        std::sample(pool.begin(), pool.end(), std::back_inserter(kept), static_cast<std::ptrdiff_t>(quota),
                    rng.engine());
    }
    std::sort(kept.begin(), kept.end());

    TransitionSet out{data.option, H, S, A, {}};
    out.samples.reserve(kept.size());
    for (std::size_t i : kept) out.samples.push_back(data.samples[i]);
    return out;
}

RleResult rle_run(Environment& env, const ParamSet& thetas, const RleConfig& config, std::uint64_t seed) {
    const int H = env.horizon(), S = env.states(), A = env.actions();
    RleConfig cfg = config;
    if (cfg.paper_faithful) cfg.c_xi = 1.0;
    if (cfg.per_stage_episodes == 0) {
        cfg.per_stage_episodes = default_exploration_budget(H, S, A, cfg.main_episodes);
        if (!cfg.paper_faithful)
            cfg.per_stage_episodes = std::min(cfg.per_stage_episodes, cfg.main_episodes * static_cast<std::uint64_t>(H));
    }
    if (!cfg.paper_faithful) cfg.validate(H);
    const prec_t xi = exploration_threshold(H, S, A, cfg.delta, cfg.c_xi);

    const std::uint64_t before = env.episodes();
    ExploreResult exploration =
        explore_run(env, {cfg.per_stage_episodes, cfg.main_episodes, xi}, mix64(seed, 1));
    const std::uint64_t explore_episodes = env.episodes() - before;

    TransitionSet collected{env.option(), H, S, A, {}};
    collected.samples.reserve(cfg.main_episodes * static_cast<std::uint64_t>(H));
    const std::uint64_t main_seed = mix64(seed, 2);
    for (std::uint64_t k = 0; k < cfg.main_episodes; ++k) {
        Rng rng(mix64(main_seed, k));
        const Policy& atom = exploration.behavior.draw(rng);
        for (const Sample& x : env.rollout(atom, H, rng)) collected.samples.push_back(x);
    }

    const auto targets =
        trim_target(exploration.oracle, exploration.behavior, cfg.main_episodes, xi, cfg.per_stage_episodes, cfg.delta);
    TransitionSet trimmed = subsample(collected, targets, mix64(seed, 3));

    RlpConfig rlp_cfg;
    rlp_cfg.delta = cfg.delta / 10.0;
    rlp_cfg.eps = cfg.eps / 10.0;
    rlp_cfg.C = cfg.C;
    rlp_cfg.option = env.option();
    auto [mapping, model] = rlp_fit(trimmed, thetas, rlp_cfg);

    RleSummary summary;
    summary.episodes_explore = explore_episodes;
    summary.episodes_main = cfg.main_episodes;
    summary.trim_retention_fraction =
        collected.samples.empty() ? 0.0
                                  : static_cast<prec_t>(trimmed.samples.size()) / static_cast<prec_t>(collected.samples.size());
    summary.per_stage_episodes = cfg.per_stage_episodes;
    summary.xi = xi;
    summary.exploration_converged = exploration.final_run.converged;

    return {std::move(mapping), std::move(model), std::move(exploration), std::move(collected), std::move(trimmed),
            summary};
}

} // namespace irl
