#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "irl/mdp.hpp"
#include "irl/reward_mapping.hpp"

namespace irl {

enum class MetricKind { exact, bruteforce, upper_bound, sampled_lower_bound };

std::string to_string(MetricKind kind);

/// Result of a distance computation. `step`, `policy` and `theta_index`
/// identify where the supremum was attained, when applicable.
struct MetricReport {
    prec_t value = 0.0;
    MetricKind kind = MetricKind::exact;
    std::optional<int> step;
    std::optional<Policy> policy;
    std::optional<std::size_t> theta_index;
};

/// Default enumeration cap for brute-force sups over deterministic policies.
inline constexpr std::uint64_t kEnumerationCap = 1'000'000;

/// d^pi(r1, r2) = max_h sum_s d^pi_h(s) |V^pi_h(s; r1) - V^pi_h(s; r2)|.
MetricReport d_pi(const Mdp& mdp, const Policy& policy, const RewardTable& r1, const RewardTable& r2);

/// Max of d_pi over all A^(S*H) deterministic policies. The true sup ranges
/// over stochastic policies as well; this is exact only when a deterministic
/// policy attains it.
MetricReport d_all_bruteforce(const Mdp& mdp, const RewardTable& r1, const RewardTable& r2,
                              std::uint64_t cap = kEnumerationCap);

/// Optimal value of the MDP with reward |r1 - r2|; an upper bound on d^all.
MetricReport d_all_surrogate(const Mdp& mdp, const RewardTable& r1, const RewardTable& r2);

/// sup over thetas of d_pi(map1(theta), map2(theta)).
MetricReport D_pi_Theta(const Mdp& mdp, const Policy& policy, const RewardMapping& map1, const RewardMapping& map2,
                        const std::vector<RewardParam>& thetas);

enum class DAllMode { bruteforce, surrogate };

MetricReport D_all_Theta(const Mdp& mdp, const RewardMapping& map1, const RewardMapping& map2,
                         const std::vector<RewardParam>& thetas, DAllMode mode,
                         std::uint64_t cap = kEnumerationCap);

/// Hausdorff distance between finite reward sets with base metric d^pi.
MetricReport hausdorff(const Mdp& mdp, const Policy& policy, const std::vector<RewardTable>& set1,
                       const std::vector<RewardTable>& set2);

/// sum_h sum_{s,a} d^eval_h(s,a) / d^b_h(s,a) with 0/0 = 0 and x/0 = +inf.
prec_t concentrability_sum(const Mdp& mdp, const Policy& pi_eval, const Policy& pi_b);

/// Average-form single-policy concentrability: concentrability_sum / (H S).
prec_t concentrability(const Mdp& mdp, const Policy& pi_eval, const Policy& pi_b);

/// sup_{h,s,a} d^{tgt, pi_tgt}_h(s,a) / d^{src, pi_src}_h(s,a).
prec_t weak_transferability(const Mdp& mdp_src, const Mdp& mdp_tgt, const Policy& pi_src, const Policy& pi_tgt);

/// inf over deterministic source policies of weak_transferability.
prec_t transferability_bruteforce(const Mdp& mdp_src, const Mdp& mdp_tgt, const Policy& pi_tgt,
                                  std::uint64_t cap = kEnumerationCap);

/// a / b with 0/0 = 0 and positive/0 = +inf.
prec_t safe_ratio(prec_t numerator, prec_t denominator);

} // namespace irl
