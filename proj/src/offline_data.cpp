#include "irl/offline_data.hpp"

#include <limits>

namespace irl {

int to_int(FeedbackOption option) { return static_cast<int>(option); }

FeedbackOption feedback_option_from_int(int value) {
    if (value == 1) return FeedbackOption::expert_action;
    if (value == 2) return FeedbackOption::support_flag;
    throw ValidationError("feedback option must be 1 or 2, got " + std::to_string(value));
}

TransitionSet to_transitions(const EpisodeDataset& dataset) {
    TransitionSet out{dataset.option, dataset.horizon, dataset.states, dataset.actions, {}};
    out.samples.reserve(dataset.episodes.size() * static_cast<std::size_t>(dataset.horizon));
    for (const auto& ep : dataset.episodes)
        for (std::size_t i = 0; i < ep.steps.size(); ++i) {
            const Step& st = ep.steps[i];
            const int next = i + 1 < ep.steps.size() ? ep.steps[i + 1].state : -1;
            out.samples.push_back({st.h, st.state, st.action, next, st.feedback});
        }
    return out;
}

void validate_dataset(const EpisodeDataset& dataset) {
    for (const auto& ep : dataset.episodes) {
        if (static_cast<int>(ep.steps.size()) != dataset.horizon)
            throw ValidationError("dataset: episode " + std::to_string(ep.k) + " has wrong length");
        for (std::size_t i = 0; i < ep.steps.size(); ++i) {
            const Step& st = ep.steps[i];
            if (st.h != static_cast<int>(i) || st.state < 0 || st.state >= dataset.states || st.action < 0 ||
                st.action >= dataset.actions)
                throw ValidationError("dataset: step out of range in episode " + std::to_string(ep.k));
            const bool ok = dataset.option == FeedbackOption::expert_action
                                ? (st.feedback >= 0 && st.feedback < dataset.actions)
                                : (st.feedback == 0 || st.feedback == 1);
            if (!ok) throw ValidationError("dataset: feedback out of range in episode " + std::to_string(ep.k));
        }
    }
}

prec_t well_posedness(const Policy& expert) {
    prec_t smallest = 1.0;
    for (prec_t p : expert.table().data())
        if (p > 0.0) smallest = std::min(smallest, p);
    return smallest;
}

EpisodeDataset collect_dataset(const Mdp& mdp, const Policy& pi_b, const Policy& pi_E, FeedbackOption option,
                               std::uint64_t episodes, std::uint64_t seed, std::optional<prec_t> delta_check) {
    check_shapes(mdp, &pi_b, nullptr);
    check_shapes(mdp, &pi_E, nullptr);
    if (option == FeedbackOption::expert_action && delta_check) {
        const prec_t delta = well_posedness(pi_E);
        if (delta < *delta_check)
            throw ValidationError("collect_dataset: expert is only " + std::to_string(delta) +
                                  "-well-posed, required " + std::to_string(*delta_check));
    }

    EpisodeDataset out;
    out.option = option;
    out.horizon = mdp.horizon();
    out.states = mdp.states();
    out.actions = mdp.actions();
    out.provenance = {seed, episodes, "behavior", "expert"};
    out.episodes.resize(episodes);

    for (std::uint64_t k = 0; k < episodes; ++k) {
        Rng rng(mix64(seed, k));
        DatasetEpisode& ep = out.episodes[k];
        ep.k = k;
        ep.steps.reserve(static_cast<std::size_t>(mdp.horizon()));
        int s = mdp.initial_state();
        for (int h = 0; h < mdp.horizon(); ++h) {
            const int a = rng.categorical(pi_b.row(h, s));
            const int e = option == FeedbackOption::expert_action ? rng.categorical(pi_E.row(h, s))
                                                                  : (pi_E(h, s, a) > 0.0 ? 1 : 0);
            ep.steps.push_back({h, s, a, e});
            s = rng.categorical(mdp.row(h, s, a));
        }
    }
    return out;
}

CountTables counts(const TransitionSet& transitions) {
    const int H = transitions.horizon, S = transitions.states, A = transitions.actions;
    CountTables c{Table3<long>(H, S, A, 0), Table2<long>(H, S, 0), Table2<long>(H, S, 0), Table3<long>(H, S, A, 0)};
    const bool option1 = transitions.option == FeedbackOption::expert_action;
    for (const Sample& x : transitions.samples) {
        ++c.n_sa(x.h, x.state, x.action);
        ++c.n_s(x.h, x.state);
        if (option1) {
            ++c.n_expert(x.h, x.state, x.feedback);
        } else {
            ++c.n_expert(x.h, x.state, x.action);
            if (x.feedback == 1) ++c.n_s_pos(x.h, x.state);
        }
    }
    return c;
}

CountTables counts(const EpisodeDataset& dataset) { return counts(to_transitions(dataset)); }

} // namespace irl
