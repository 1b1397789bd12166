#include "irl/metrics.hpp"

#include <cmath>
#include <limits>

namespace irl {

namespace {

void require_same_shape(const Mdp& mdp, const RewardTable& r1, const RewardTable& r2) {
    check_shapes(mdp, nullptr, &r1);
    check_shapes(mdp, nullptr, &r2);
}

std::uint64_t require_enumerable(const Mdp& mdp, std::uint64_t cap) {
    const auto count = deterministic_policy_count(mdp.horizon(), mdp.states(), mdp.actions(), cap);
    if (!count) throw ValidationError("enumeration cap exceeded: A^(S*H) > " + std::to_string(cap));
    return *count;
}

/// d^pi given the occupancy of pi, reusing it across reward pairs.
std::pair<prec_t, int> d_pi_with(const Mdp& mdp, const Policy& policy, const Occupancy& occ,
                                 const RewardTable& r1, const RewardTable& r2) {
    // V^pi is linear in r, so evaluate the difference reward once.
    RewardTable diff = r1;
    for (std::size_t i = 0; i < diff.r.data().size(); ++i) diff.r.data()[i] -= r2.r.data()[i];
    const auto vt = evaluate_policy(mdp, diff, policy);
    prec_t best = 0.0;
    int best_h = 0;
    for (int h = 0; h < mdp.horizon(); ++h) {
        prec_t acc = 0.0;
        for (int s = 0; s < mdp.states(); ++s) acc += occ.state(h, s) * std::abs(vt.v(h, s));
        if (acc > best) {
            best = acc;
            best_h = h;
        }
    }
    return {best, best_h};
}

} // namespace

std::string to_string(MetricKind kind) {
    switch (kind) {
    case MetricKind::exact: return "exact";
    case MetricKind::bruteforce: return "bruteforce";
    case MetricKind::upper_bound: return "upper_bound";
    case MetricKind::sampled_lower_bound: return "sampled_lower_bound";
    }
    return "unknown";
}

prec_t safe_ratio(prec_t numerator, prec_t denominator) {
    if (denominator == 0.0) return numerator == 0.0 ? 0.0 : std::numeric_limits<prec_t>::infinity();
    return numerator / denominator;
}

MetricReport d_pi(const Mdp& mdp, const Policy& policy, const RewardTable& r1, const RewardTable& r2) {
    require_same_shape(mdp, r1, r2);
    check_shapes(mdp, &policy, nullptr);
    const auto occ = occupancy(mdp, policy);
    const auto [value, step] = d_pi_with(mdp, policy, occ, r1, r2);
    MetricReport report;
    report.value = value;
    report.kind = MetricKind::exact;
    report.step = step;
    return report;
}

MetricReport d_all_bruteforce(const Mdp& mdp, const RewardTable& r1, const RewardTable& r2, std::uint64_t cap) {
    require_same_shape(mdp, r1, r2);
    const std::uint64_t count = require_enumerable(mdp, cap);
    MetricReport report;
    report.kind = MetricKind::bruteforce;
    report.value = -1.0;
    for (std::uint64_t i = 0; i < count; ++i) {
        Policy pi = decode_deterministic_policy(i, mdp.horizon(), mdp.states(), mdp.actions());
        const auto occ = occupancy(mdp, pi);
        const auto [value, step] = d_pi_with(mdp, pi, occ, r1, r2);
        if (value > report.value) {
            report.value = value;
            report.step = step;
            report.policy = std::move(pi);
        }
    }
    return report;
}

MetricReport d_all_surrogate(const Mdp& mdp, const RewardTable& r1, const RewardTable& r2) {
    require_same_shape(mdp, r1, r2);
    RewardTable gap = r1;
    for (std::size_t i = 0; i < gap.r.data().size(); ++i) gap.r.data()[i] = std::abs(r1.r.data()[i] - r2.r.data()[i]);
    auto solution = optimal_policy(mdp, gap);
    MetricReport report;
    report.kind = MetricKind::upper_bound;
    report.value = solution.values.v(0, mdp.initial_state());
    report.step = 0;
    report.policy = std::move(solution.policy);
    return report;
}

MetricReport D_pi_Theta(const Mdp& mdp, const Policy& policy, const RewardMapping& map1, const RewardMapping& map2,
                        const std::vector<RewardParam>& thetas) {
    if (thetas.empty()) throw ValidationError("D_pi_Theta: empty parameter list");
    check_shapes(mdp, &policy, nullptr);
    const auto occ = occupancy(mdp, policy);
    MetricReport report;
    report.kind = MetricKind::exact;
    report.value = -1.0;
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        const auto r1 = map1(thetas[i]);
        const auto r2 = map2(thetas[i]);
        require_same_shape(mdp, r1, r2);
        const auto [value, step] = d_pi_with(mdp, policy, occ, r1, r2);
        if (value > report.value) {
            report.value = value;
            report.step = step;
            report.theta_index = i;
        }
    }
    return report;
}

MetricReport D_all_Theta(const Mdp& mdp, const RewardMapping& map1, const RewardMapping& map2,
                         const std::vector<RewardParam>& thetas, DAllMode mode, std::uint64_t cap) {
    if (thetas.empty()) throw ValidationError("D_all_Theta: empty parameter list");
    if (mode == DAllMode::bruteforce) require_enumerable(mdp, cap);
    MetricReport best;
    best.value = -1.0;
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        const auto r1 = map1(thetas[i]);
        const auto r2 = map2(thetas[i]);
        auto report = mode == DAllMode::bruteforce ? d_all_bruteforce(mdp, r1, r2, cap) : d_all_surrogate(mdp, r1, r2);
        if (report.value > best.value) {
            best = std::move(report);
            best.theta_index = i;
        }
    }
    return best;
}

MetricReport hausdorff(const Mdp& mdp, const Policy& policy, const std::vector<RewardTable>& set1,
                       const std::vector<RewardTable>& set2) {
    if (set1.empty() || set2.empty()) throw ValidationError("hausdorff: empty reward set");
    check_shapes(mdp, &policy, nullptr);
    const auto occ = occupancy(mdp, policy);

    std::vector<prec_t> dist(set1.size() * set2.size());
    for (std::size_t i = 0; i < set1.size(); ++i)
        for (std::size_t j = 0; j < set2.size(); ++j) {
            require_same_shape(mdp, set1[i], set2[j]);
            dist[i * set2.size() + j] = d_pi_with(mdp, policy, occ, set1[i], set2[j]).first;
        }

    prec_t forward = 0.0;
    for (std::size_t i = 0; i < set1.size(); ++i) {
        prec_t nearest = std::numeric_limits<prec_t>::infinity();
        for (std::size_t j = 0; j < set2.size(); ++j) nearest = std::min(nearest, dist[i * set2.size() + j]);
        forward = std::max(forward, nearest);
    }
    prec_t backward = 0.0;
    for (std::size_t j = 0; j < set2.size(); ++j) {
        prec_t nearest = std::numeric_limits<prec_t>::infinity();
        for (std::size_t i = 0; i < set1.size(); ++i) nearest = std::min(nearest, dist[i * set2.size() + j]);
        backward = std::max(backward, nearest);
    }
    MetricReport report;
    report.kind = MetricKind::exact;
    report.value = std::max(forward, backward);
    return report;
}

prec_t concentrability_sum(const Mdp& mdp, const Policy& pi_eval, const Policy& pi_b) {
    check_shapes(mdp, &pi_eval, nullptr);
    check_shapes(mdp, &pi_b, nullptr);
    const auto d_eval = occupancy(mdp, pi_eval);
    const auto d_b = occupancy(mdp, pi_b);
    prec_t total = 0.0;
    const auto& num = d_eval.state_action.data();
    const auto& den = d_b.state_action.data();
    for (std::size_t i = 0; i < num.size(); ++i) total += safe_ratio(num[i], den[i]);
    return total;
}

prec_t concentrability(const Mdp& mdp, const Policy& pi_eval, const Policy& pi_b) {
    return concentrability_sum(mdp, pi_eval, pi_b) / (static_cast<prec_t>(mdp.horizon()) * mdp.states());
}

prec_t weak_transferability(const Mdp& mdp_src, const Mdp& mdp_tgt, const Policy& pi_src, const Policy& pi_tgt) {
    if (mdp_src.horizon() != mdp_tgt.horizon() || mdp_src.states() != mdp_tgt.states() ||
        mdp_src.actions() != mdp_tgt.actions())
        throw ValidationError("weak_transferability: source and target shapes differ");
    check_shapes(mdp_src, &pi_src, nullptr);
    check_shapes(mdp_tgt, &pi_tgt, nullptr);
    const auto d_src = occupancy(mdp_src, pi_src);
    const auto d_tgt = occupancy(mdp_tgt, pi_tgt);
    prec_t worst = 0.0;
    const auto& num = d_tgt.state_action.data();
    const auto& den = d_src.state_action.data();
    for (std::size_t i = 0; i < num.size(); ++i) worst = std::max(worst, safe_ratio(num[i], den[i]));
    return worst;
}

prec_t transferability_bruteforce(const Mdp& mdp_src, const Mdp& mdp_tgt, const Policy& pi_tgt, std::uint64_t cap) {
    const std::uint64_t count = require_enumerable(mdp_src, cap);
    prec_t best = std::numeric_limits<prec_t>::infinity();
    for (std::uint64_t i = 0; i < count; ++i) {
        const Policy pi = decode_deterministic_policy(i, mdp_src.horizon(), mdp_src.states(), mdp_src.actions());
        best = std::min(best, weak_transferability(mdp_src, mdp_tgt, pi, pi_tgt));
    }
    return best;
}

} // namespace irl
