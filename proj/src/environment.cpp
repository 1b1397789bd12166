#include "irl/environment.hpp"

namespace irl {

Environment::Environment(Mdp mdp, Policy expert, FeedbackOption option)
    : mdp_(std::move(mdp)), expert_(std::move(expert)), option_(option) {
    validate_mdp(mdp_);
    check_shapes(mdp_, &expert_, nullptr);
}

int Environment::draw_initial_state(Rng&) {
    ++episodes_;
    return mdp_.initial_state();
}

std::vector<Sample> Environment::rollout(const Policy& policy, int length, Rng& rng) {
    ++episodes_;
    std::vector<Sample> out;
    out.reserve(static_cast<std::size_t>(length));
    int s = mdp_.initial_state();
    for (int h = 0; h < length && h < mdp_.horizon(); ++h) {
        const int a = rng.categorical(policy.row(h, s));
        const int e = option_ == FeedbackOption::expert_action ? rng.categorical(expert_.row(h, s))
                                                               : (expert_(h, s, a) > 0.0 ? 1 : 0);
        const int next = rng.categorical(mdp_.row(h, s, a));
        out.push_back({h, s, a, next, e});
        s = next;
    }
    return out;
}

} // namespace irl
