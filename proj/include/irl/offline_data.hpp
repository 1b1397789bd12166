#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "irl/mdp.hpp"

namespace irl {

/// Expert feedback channel.
/// option 1: e is an action sampled from the expert at the visited state.
/// option 2: e is the bit 1{a in supp(pi^E_h(.|s))} for the behavior action.
enum class FeedbackOption { expert_action = 1, support_flag = 2 };

int to_int(FeedbackOption option);
FeedbackOption feedback_option_from_int(int value);

struct Step {
    int h;
    int state;
    int action;
    int feedback;
    bool operator==(const Step&) const = default;
};

struct DatasetEpisode {
    std::uint64_t k = 0;
    std::vector<Step> steps;
    bool operator==(const DatasetEpisode&) const = default;
};

struct Provenance {
    std::uint64_t seed = 0;
    std::uint64_t episodes = 0;
    std::string behavior_id;
    std::string expert_id;
    bool operator==(const Provenance&) const = default;
};

/// K reward-free trajectories with expert feedback.
struct EpisodeDataset {
    FeedbackOption option = FeedbackOption::expert_action;
    int horizon = 0;
    int states = 0;
    int actions = 0;
    std::vector<DatasetEpisode> episodes;
    Provenance provenance;

    bool operator==(const EpisodeDataset&) const = default;
};

/// A single (h, s, a, s', e) sample. next_state is -1 when the successor was
/// not observed (last step of an episode).
struct Sample {
    int h;
    int state;
    int action;
    int next_state;
    int feedback;
    bool operator==(const Sample&) const = default;
};

/// Transition pool: the representation RLP consumes. Episodes flatten into
/// it; subsampling produces it directly.
struct TransitionSet {
    FeedbackOption option = FeedbackOption::expert_action;
    int horizon = 0;
    int states = 0;
    int actions = 0;
    std::vector<Sample> samples;
};

TransitionSet to_transitions(const EpisodeDataset& dataset);

void validate_dataset(const EpisodeDataset& dataset);

/// Smallest nonzero probability of the policy (1 for deterministic policies).
prec_t well_posedness(const Policy& expert);

/// Collects K episodes with behavior pi_b. Episode k uses seed mix64(seed, k).
/// With option 1 and `delta_check` set, throws when the expert is not
/// Delta-well-posed for that Delta.
EpisodeDataset collect_dataset(const Mdp& mdp, const Policy& pi_b, const Policy& pi_E, FeedbackOption option,
                               std::uint64_t episodes, std::uint64_t seed,
                               std::optional<prec_t> delta_check = std::nullopt);

struct CountTables {
    Table3<long> n_sa;      ///< N^b_h(s, a)
    Table2<long> n_s;       ///< N^b_h(s)
    Table2<long> n_s_pos;   ///< N^b_{h,1}(s): visits with e = 1 (option 2 only)
    Table3<long> n_expert;  ///< option 1: #(s_h, e_h) = (s, a); option 2: equals n_sa
};

CountTables counts(const EpisodeDataset& dataset);
CountTables counts(const TransitionSet& transitions);

} // namespace irl
