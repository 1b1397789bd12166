#pragma once

#include <cstdint>
#include <vector>

#include "irl/offline_data.hpp"

namespace irl {

/// Online access to an IRL problem: episodes are rolled out in the true MDP
/// and each step returns expert feedback. Every call that starts an episode
/// is counted.
class Environment {
public:
    Environment(Mdp mdp, Policy expert, FeedbackOption option);

    int horizon() const { return mdp_.horizon(); }
    int states() const { return mdp_.states(); }
    int actions() const { return mdp_.actions(); }
    FeedbackOption option() const { return option_; }

    /// Starts an episode and returns only its initial state.
    int draw_initial_state(Rng& rng);

    /// Rolls the first `length` steps of an episode under `policy`.
    std::vector<Sample> rollout(const Policy& policy, int length, Rng& rng);

    std::uint64_t episodes() const { return episodes_; }

    /// Ground truth, for evaluation only; learners must not read it.
    const Mdp& true_mdp() const { return mdp_; }
    const Policy& true_expert() const { return expert_; }

private:
    Mdp mdp_;
    Policy expert_;
    FeedbackOption option_;
    std::uint64_t episodes_ = 0;
};

} // namespace irl
