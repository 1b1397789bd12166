#include "irl/rlp.hpp"

#include <algorithm>
#include <cmath>

namespace irl {

void RlpConfig::validate() const {
    if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("RlpConfig: delta must lie in (0, 1)");
    if (!(eps > 0.0)) throw ValidationError("RlpConfig: eps must be positive");
    if (!(C >= 0.0)) throw ValidationError("RlpConfig: C must be nonnegative");
    if (!(log_cover > 0.0)) throw ValidationError("RlpConfig: log_cover must be positive");
}

prec_t RlpModel::iota() const {
    return std::log(static_cast<prec_t>(horizon) * states * actions / config.delta);
}

RlpModel fit_empirical(const TransitionSet& data, const RlpConfig& config) {
    config.validate();
    if (data.option != config.option) throw ValidationError("fit_empirical: dataset option does not match config");
    const int H = data.horizon, S = data.states, A = data.actions;

    RlpModel model;
    model.horizon = H;
    model.states = S;
    model.actions = A;
    model.config = config;
    model.counts = counts(data);
    model.p_hat = Kernel(H, S, A);
    model.expert_hat = Table3<prec_t>(H, S, A, 0.0);
    model.expert_support = Table3<std::uint8_t>(H, S, A, 0);

    Table3<long> positive(H, S, A, 0);
    for (const Sample& x : data.samples) {
        if (x.next_state >= 0) model.p_hat(x.h, x.state, x.action, x.next_state) += 1.0;
        if (data.option == FeedbackOption::support_flag && x.feedback == 1) ++positive(x.h, x.state, x.action);
    }

    const auto& c = model.counts;
    for (int h = 0; h < H; ++h)
        for (int s = 0; s < S; ++s) {
            const bool option1 = data.option == FeedbackOption::expert_action;
            const prec_t denom =
                static_cast<prec_t>(std::max<long>(option1 ? c.n_s(h, s) : c.n_s_pos(h, s), 1));
            for (int a = 0; a < A; ++a) {
                const prec_t n = static_cast<prec_t>(std::max<long>(c.n_sa(h, s, a), 1));
                for (prec_t& p : model.p_hat.row(h, s, a)) p /= n;
                const long hits = option1 ? c.n_expert(h, s, a) : positive(h, s, a);
                model.expert_hat(h, s, a) = static_cast<prec_t>(hits) / denom;
                model.expert_support(h, s, a) = hits > 0 ? 1 : 0;
            }
        }
    return model;
}

RlpModel fit_empirical(const EpisodeDataset& dataset, const RlpConfig& config) {
    return fit_empirical(to_transitions(dataset), config);
}

prec_t empirical_variance(const RlpModel& model, int h, int s, int a, std::span<const prec_t> next_values) {
    const auto row = model.p_hat.row(h, s, a);
    prec_t mean = 0.0, second = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
        mean += row[j] * next_values[j];
        second += row[j] * next_values[j] * next_values[j];
    }
    return std::max(0.0, second - mean * mean);
}

prec_t bonus_value(prec_t C, prec_t log_factor, long visits, prec_t variance, int horizon, prec_t eps) {
    const prec_t n = static_cast<prec_t>(std::max<long>(visits, 1));
    const prec_t H = static_cast<prec_t>(horizon);
    const prec_t inner = std::sqrt(log_factor * variance / n) + H * log_factor / n +
                         (eps / H) * (1.0 + std::sqrt(log_factor / n));
    return C * std::min(inner, H);
}

namespace {

std::span<const prec_t> next_values(const RewardParam& theta, int h, const std::vector<prec_t>& terminal) {
    return h + 1 < theta.horizon() ? theta.values.row(h + 1) : std::span<const prec_t>(terminal);
}

void check_param(const RlpModel& model, const RewardParam& theta) {
    if (theta.horizon() != model.horizon || theta.states() != model.states || theta.actions() != model.actions)
        throw ValidationError("RLP: parameter shape does not match model");
    validate_param(theta);
}

} // namespace

Table3<prec_t> bonus(const RlpModel& model, const RewardParam& theta, prec_t eps) {
    check_param(model, theta);
    const int H = model.horizon, S = model.states, A = model.actions;
    const prec_t log_factor = model.config.log_cover * model.iota();
    const std::vector<prec_t> terminal(static_cast<std::size_t>(S), 0.0);
    Table3<prec_t> b(H, S, A, 0.0);
    for (int h = 0; h < H; ++h) {
        const auto next = next_values(theta, h, terminal);
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) {
                const prec_t var = empirical_variance(model, h, s, a, next);
                b(h, s, a) = bonus_value(model.config.C, log_factor, model.counts.n_sa(h, s, a), var, H, eps);
            }
    }
    return b;
}

RewardTable estimated_reward(const RlpModel& model, const RewardParam& theta, prec_t eps) {
    const auto b = bonus(model, theta, eps);
    const int H = model.horizon, S = model.states, A = model.actions;
    const std::vector<prec_t> terminal(static_cast<std::size_t>(S), 0.0);
    RewardTable out{Table3<prec_t>(H, S, A, 0.0), 3.0 * H + model.config.C * H};
    for (int h = 0; h < H; ++h) {
        const auto next = next_values(theta, h, terminal);
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) {
                const auto row = model.p_hat.row(h, s, a);
                prec_t pv = 0.0;
                for (int j = 0; j < S; ++j) pv += row[j] * next[j];
                const prec_t penalty = model.expert_support(h, s, a) ? 0.0 : theta.advantages(h, s, a);
                out(h, s, a) = -penalty + theta.values(h, s) - pv - b(h, s, a);
            }
    }
    return out;
}

std::pair<RewardMapping, std::shared_ptr<const RlpModel>> rlp_fit(const TransitionSet& data,
                                                                  const ParamSet& thetas, RlpConfig config) {
    if (thetas.kind == ParamSet::Kind::finite_list && thetas.members.empty())
        throw ValidationError("rlp_run: empty parameter list");
    config.log_cover = log_cover(thetas, config.eps / data.horizon);
    auto model = std::make_shared<const RlpModel>(fit_empirical(data, config));
    const prec_t eps = config.eps;
    RewardMapping mapping(RewardMapping::Origin::estimated,
                          [model, eps](const RewardParam& theta) { return estimated_reward(*model, theta, eps); });
    return {std::move(mapping), std::move(model)};
}

RewardMapping rlp_run(const TransitionSet& data, const ParamSet& thetas, RlpConfig config) {
    return rlp_fit(data, thetas, config).first;
}

RewardMapping rlp_run(const EpisodeDataset& dataset, const ParamSet& thetas, RlpConfig config) {
    return rlp_run(to_transitions(dataset), thetas, config);
}

} // namespace irl
