#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "irl/mdp.hpp"

namespace irl {

/// Parameter theta = (V, A) of a reward mapping.
///
/// values is H x S with |V_h| <= H - h; advantages is H x S x A, nonnegative
/// and bounded by H - h (0-based steps).
struct RewardParam {
    Table2<prec_t> values;
    Table3<prec_t> advantages;

    int horizon() const { return values.rows(); }
    int states() const { return values.cols(); }
    int actions() const { return advantages.actions(); }

    static RewardParam zeros(int horizon, int states, int actions) {
        return {Table2<prec_t>(horizon, states, 0.0), Table3<prec_t>(horizon, states, actions, 0.0)};
    }
    bool operator==(const RewardParam&) const = default;
};

void validate_param(const RewardParam& theta);

/// Parameter set Theta: either an explicit finite list or the full box.
struct ParamSet {
    enum class Kind { finite_list, full_box };

    Kind kind = Kind::finite_list;
    std::vector<RewardParam> members;
    int horizon = 0;
    int states = 0;
    int actions = 0;

    static ParamSet finite(std::vector<RewardParam> members);
    static ParamSet full_box(int horizon, int states, int actions);
};

/// Log covering-number surrogate, clipped below at 1.
/// finite list: max(log |Theta|, 1); full box: max(S log(3H / eps), 1).
prec_t log_cover(const ParamSet& theta_set, prec_t eps);

/// Support mask {a : pi_h(a|s) > 0}, exact zero test.
Table3<std::uint8_t> policy_support(const Policy& policy);

/// r_h(s,a) = -A_h(s,a) 1{a not in supp(pi_h(.|s))} + V_h(s) - [P_h V_{h+1}](s,a)
/// with V_H = 0. The declared bound is 3H.
RewardTable ground_truth_reward(const Mdp& mdp, const Policy& expert, const RewardParam& theta);

/// Same formula against a precomputed support mask.
RewardTable ground_truth_reward(const Mdp& mdp, const Table3<std::uint8_t>& support, const RewardParam& theta);

/// Uniform theta with |V_h| <= scale (H - h) and A_h in [0, scale (H - h)].
RewardParam sample_theta(int horizon, int states, int actions, std::uint64_t seed, prec_t scale = 1.0);

/// A sampled finite parameter list; member i uses seed mix64(seed, i).
std::vector<RewardParam> sample_thetas(int horizon, int states, int actions, int count, std::uint64_t seed,
                                       prec_t scale = 1.0);

/// True iff the expert is optimal for `reward` at tolerance 1e-9 and |r| <= 3H.
bool check_feasible_bounded(const Mdp& mdp, const Policy& expert, const RewardTable& reward);
bool check_feasible_bounded(const Mdp& mdp, const Policy& expert, const RewardParam& theta);

/// Evaluator theta -> reward, tagged with its origin.
class RewardMapping {
public:
    enum class Origin { ground_truth, estimated };
    using Evaluator = std::function<RewardTable(const RewardParam&)>;

    RewardMapping(Origin origin, Evaluator evaluator) : origin_(origin), evaluator_(std::move(evaluator)) {}

    Origin origin() const { return origin_; }
    RewardTable operator()(const RewardParam& theta) const { return evaluator_(theta); }

private:
    Origin origin_;
    Evaluator evaluator_;
};

/// R* for (mdp, expert). Copies what it needs, so the result is self-contained.
RewardMapping ground_truth_mapping(const Mdp& mdp, const Policy& expert);

} // namespace irl
