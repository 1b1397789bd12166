// Acceptance runner: one PASS/FAIL line per criterion. Exit status is 0 only
// when every criterion passes, including its runtime budget.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>

#include "irl/explore.hpp"
#include "irl/rle.hpp"
#include "irl/harness.hpp"
#include "irl/instances.hpp"
#include "irl/metrics.hpp"
#include "irl/rlp.hpp"
#include "oracles.hpp"

using namespace irl;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string medians_text(const std::vector<std::pair<std::uint64_t, prec_t>>& m) {
    std::string out = "[";
    for (std::size_t i = 0; i < m.size(); ++i) out += (i ? ", " : "") + fmt("%.4g", m[i].second);
    return out + "]";
}

Verdict feasibility() {
    Rng rng(101);
    int ok = 0, total = 0;
    for (std::uint64_t i = 0; i < 100; ++i) {
        const int H = 1 + rng.index(5), S = 1 + rng.index(6), A = 1 + rng.index(4);
        const auto p = random_mdp(H, S, A, mix64(101, i));
        for (const auto& t : sample_thetas(H, S, A, 20, mix64(102, i))) {
            const auto r = ground_truth_reward(p.mdp, p.expert, t);
            ok += is_optimal(p.mdp, r, p.expert, 1e-9) && r.sup_norm() <= 3.0 * H;
            ++total;
        }
    }
    return {ok == total, fmt("%d/%d (MDP, theta) pairs feasible and bounded", ok, total)};
}

Verdict monotonicity() {
    int good = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto p = random_mdp(4, 4, 3, mix64(201, seed));
        const auto thetas = sample_thetas(4, 4, 3, 10, mix64(202, seed));
        const Policy behavior = random_full_support_policy(4, 4, 3, mix64(203, seed));
        const auto d = collect_dataset(p.mdp, behavior, p.expert, FeedbackOption::expert_action, 5000, mix64(204, seed));
        RlpConfig cfg;
        cfg.delta = 0.1;
        cfg.C = 1.0;
        const auto est = rlp_run(d, ParamSet::finite(thetas), cfg);
        good += is_monotone(ground_truth_mapping(p.mdp, p.expert), est, thetas);
    }
    return {good >= 45, fmt("monotone on %d/50 seeds (need >= 45)", good)};
}

ExperimentConfig offline_sweep(const char* scenario) {
    Json j = {{"scenario", scenario},
              {"seed", 0},
              {"instance", {{"H", 4}, {"S", 4}, {"A", 3}, {"seed", 1}}},
              {"behavior", "full_support"},
              {"evaluation", "expert"},
              {"theta_count", 10},
              {"delta", 0.1},
              {"eps", 0.1},
              {"C", 1.0},
              {"K", Json::array()},
              {"seeds", Json::array()}};
    for (int e = 10; e <= 17; ++e) j["K"].push_back(1ULL << e);
    for (int s = 0; s < 20; ++s) j["seeds"].push_back(s);
    return ExperimentConfig::from_json(j);
}

Verdict rate_check(const ExperimentConfig& cfg, bool require_monotone) {
    const auto res = run_experiment(cfg);
    AcceptanceCheck check;
    check.slope_min = -0.65;
    check.slope_max = -0.35;
    check.medians_nonincreasing = true;
    check.strict = true;
    if (require_monotone) check.min_monotone_fraction = 0.9;
    const auto outcome = evaluate_acceptance(check, res.rows);
    const auto m = median_by_k(res.rows);
    std::string detail = fmt("slope %.4f, monotone %.3f, medians ", fit_rate(m), monotone_fraction(res.rows)) +
                         medians_text(m);
    for (const auto& msg : outcome.messages) detail += "; " + msg;
    return {outcome.passed, detail};
}

Verdict online_pipeline() {
    Json j = {{"scenario", "online"},
              {"seed", 0},
              {"instance", {{"H", 3}, {"S", 3}, {"A", 2}, {"seed", 1}}},
              {"theta_count", 10},
              {"K", Json::array()},
              {"seeds", Json::array()}};
    for (int e = 10; e <= 15; ++e) j["K"].push_back(1ULL << e);
    for (int s = 0; s < 10; ++s) j["seeds"].push_back(s);
    const auto cfg = ExperimentConfig::from_json(j);
    const auto res = run_experiment(cfg);
    const auto m = median_by_k(res.rows);
    const bool medians_ok = medians_nonincreasing(m, false);

    const auto fixture = build_fixture(cfg);
    std::vector<Policy> sample;
    for (std::uint64_t i = 0; i < 100; ++i) sample.push_back(random_deterministic_policy(3, 3, 2, mix64(501, i)));
    const double bound = 2.0 * 3 * 3 * 2;
    double worst = 0.0;
    for (std::uint64_t K : cfg.k_schedule) {
        Environment env(fixture.mdp, fixture.expert, FeedbackOption::expert_action);
        RleConfig rc;
        rc.main_episodes = K;
        const auto run = rle_run(env, ParamSet::finite(fixture.thetas), rc, mix64(502, K));
        worst = std::max(worst, coverage_certificate(run.exploration.oracle, run.exploration.behavior, sample, K));
    }
    return {medians_ok && worst <= bound,
            fmt("medians %s, max certificate %.3f (bound %.0f), medians ", medians_ok ? "nonincreasing" : "INCREASE",
                worst, bound) +
                medians_text(m)};
}

RewardTable random_reward(int H, int S, int A, std::uint64_t seed) {
    Rng rng(seed);
    RewardTable r = RewardTable::zeros(H, S, A);
    for (auto& x : r.r.data()) x = rng.uniform(-1.0, 1.0);
    r.declared_bound = 1.0;
    return r;
}

Verdict metric_oracles() {
    int dominated = 0;
    double worst_gap = 0.0;
    for (std::uint64_t i = 0; i < 200; ++i) {
        const auto p = random_mdp(2, 2, 2, mix64(601, i));
        const auto r1 = random_reward(2, 2, 2, mix64(602, i));
        const auto r2 = random_reward(2, 2, 2, mix64(603, i));
        const double sur = d_all_surrogate(p.mdp, r1, r2).value;
        const double brute = d_all_bruteforce(p.mdp, r1, r2).value;
        dominated += sur >= brute - 1e-9;
        worst_gap = std::min(worst_gap, sur - brute);
    }
    int hausdorff_ok = 0;
    for (std::uint64_t i = 0; i < 100; ++i) {
        const auto p = random_mdp(3, 3, 2, mix64(604, i));
        const Policy pi = random_full_support_policy(3, 3, 2, mix64(605, i));
        const auto thetas = sample_thetas(3, 3, 2, 8, mix64(606, i));
        const auto truth = ground_truth_mapping(p.mdp, p.expert);
        const auto d = collect_dataset(p.mdp, Policy::uniform(3, 3, 2), p.expert, FeedbackOption::expert_action, 200,
                                       mix64(607, i));
        const auto est = rlp_run(d, ParamSet::finite(thetas), RlpConfig{});
        std::vector<RewardTable> s1, s2;
        for (const auto& t : thetas) {
            s1.push_back(truth(t));
            s2.push_back(est(t));
        }
        hausdorff_ok += hausdorff(p.mdp, pi, s1, s2).value <= D_pi_Theta(p.mdp, pi, truth, est, thetas).value + 1e-9;
    }
    return {dominated == 200 && hausdorff_ok == 100,
            fmt("surrogate >= bruteforce on %d/200 (min gap %.3g); Hausdorff <= D_pi_Theta on %d/100", dominated,
                worst_gap, hausdorff_ok)};
}

Verdict planning() {
    int ok = 0;
    double slack = 1e300;
    for (std::uint64_t i = 0; i < 200; ++i) {
        const auto c = oracle::planning_case(mix64(701, i));
        const double margin = c.eps + c.eps_hat + 2 * c.eps_bar + 1e-8 - c.regret;
        ok += margin >= 0.0;
        slack = std::min(slack, margin);
    }
    return {ok == 200, fmt("%d/200 cases satisfy the bound (min slack %.3g)", ok, slack)};
}

Verdict estimators() {
    int exact = 0;
    for (std::uint64_t i = 0; i < 50; ++i) {
        Rng rng(mix64(801, i));
        const int H = 2 + rng.index(3), S = 2 + rng.index(3), A = 2 + rng.index(2);
        const auto p = random_mdp(H, S, A, mix64(802, i));
        const auto option = i % 2 ? FeedbackOption::support_flag : FeedbackOption::expert_action;
        const Policy expert = random_stochastic_expert(H, S, A, mix64(803, i), 2);
        const auto d = collect_dataset(p.mdp, random_full_support_policy(H, S, A, mix64(804, i)), expert, option,
                                       100 + 37 * i, mix64(805, i));
        RlpConfig cfg;
        cfg.option = option;
        const auto m = fit_empirical(d, cfg);
        const auto ref = oracle::recount(d);
        exact += m.counts.n_sa == ref.n_sa && m.counts.n_s == ref.n_s && m.counts.n_s_pos == ref.n_s_pos &&
                 m.counts.n_expert == ref.n_expert && m.p_hat == ref.p_hat && m.expert_hat == ref.expert_hat;
    }

    int checks = 0, within = 0;
    for (std::uint64_t i = 0; i < 5; ++i) {
        const auto p = random_mdp(3, 3, 2, mix64(806, i));
        const Policy pi = random_full_support_policy(3, 3, 2, mix64(807, i));
        const auto r = random_reward(3, 3, 2, mix64(808, i));
        const double value = evaluate_policy(p.mdp, r, pi).v(0, p.mdp.initial_state());
        const auto occ = occupancy(p.mdp, pi).state_action;
        const int n = 200'000;
        Rng rng(mix64(809, i));
        std::vector<double> returns;
        returns.reserve(n);
        Table3<double> freq(3, 3, 2, 0.0);
        for (int k = 0; k < n; ++k) {
            double g = 0.0;
            for (const auto& t : sample_episode(p.mdp, pi, rng)) {
                g += r(t.h, t.state, t.action);
                freq(t.h, t.state, t.action) += 1.0;
            }
            returns.push_back(g);
        }
        const auto est = oracle::mean_of(returns);
        ++checks;
        within += std::abs(est.mean - value) <= 3.0 * est.stderr_;
        for (std::size_t c = 0; c < occ.data().size(); ++c) {
            const double q = occ.data()[c];
            ++checks;
            within += std::abs(freq.data()[c] / n - q) <= 3.0 * std::sqrt(q * (1 - q) / n) + 1e-12;
        }
    }
    return {exact == 50 && within == checks,
            fmt("recount exact on %d/50 datasets; Monte-Carlo within 3 sigma on %d/%d checks", exact, within, checks)};
}

std::vector<SignVector> balanced_pool(int S, int count, std::uint64_t seed) {
    if (S >= 8) return packing_set(S, count, seed).members;
    Rng rng(seed);
    SignVector base(static_cast<std::size_t>(S), 1);
    std::fill(base.begin() + S / 2, base.end(), -1);
    std::vector<SignVector> out;
    for (int i = 0; i < count; ++i) {
        std::shuffle(base.begin(), base.end(), rng.engine());
        out.push_back(base);
    }
    return out;
}

Verdict hard_instances() {
    int instances = 0, ok = 0;
    double worst_ratio = 0.0;
    for (int H : {2, 3, 4})
        for (int S : {4, 8, 16})
            for (int A : {2, 3})
                for (double c_star : {2.0, 4.0, 10.0}) {
                    const int K = std::min(S, A);
                    for (int i_star = 0; i_star < K; ++i_star) {
                        const std::uint64_t seed = mix64(mix64(901, static_cast<std::uint64_t>(H * 1000 + S * 10 + A)),
                                                         static_cast<std::uint64_t>(c_star * 10 + i_star));
                        const auto spec = make_hard_spec(H, S, A, 0.25, c_star, i_star, balanced_pool(S, 8, seed), seed);
                        const auto off = hard_offline(spec);
                        bool valid = true;
                        try {
                            validate_mdp(off.mdp);
                        } catch (const ValidationError&) {
                            valid = false;
                        }
                        const double sum = concentrability_sum(off.mdp, off.evaluation, off.behavior);
                        const double bound = c_star * (2 * H + 2) * (2 * S + 1);
                        worst_ratio = std::max(worst_ratio, sum / bound);
                        ok += valid && sum <= bound;
                        ++instances;
                    }
                }
    int sets = 0, sets_ok = 0;
    for (int S : {8, 16, 32, 64}) {
        const auto set = packing_set(S, 20, mix64(902, static_cast<std::uint64_t>(S)));
        bool good = set.complete;
        for (std::size_t i = 0; i < set.members.size(); ++i) {
            good = good && std::accumulate(set.members[i].begin(), set.members[i].end(), 0) == 0;
            for (std::size_t j = i + 1; j < set.members.size(); ++j)
                good = good && 8 * packing_distance(set.members[i], set.members[j]) >= S;
        }
        sets_ok += good;
        ++sets;
    }
    return {ok == instances && sets_ok == sets,
            fmt("%d/%d offline instances valid and within bound (max sum/bound %.3f); %d/%d packing sets pass", ok,
                instances, worst_ratio, sets_ok, sets)};
}

Verdict zero_noise() {
    int ok = 0, total = 0;
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 20; ++i) {
        Rng rng(mix64(1001, i));
        const int H = 2 + rng.index(3), S = 2 + rng.index(4), A = 2 + rng.index(3);
        Mdp m(H, S, A, 0);
        Table3<int> next(H, S, A, 0);
        for (int h = 0; h < H; ++h)
            for (int s = 0; s < S; ++s)
                for (int a = 0; a < A; ++a) {
                    next(h, s, a) = rng.index(S);
                    m.transition(h, s, a, next(h, s, a)) = 1.0;
                }
        const Policy expert = random_deterministic_policy(H, S, A, mix64(1002, i));
        TransitionSet data{FeedbackOption::expert_action, H, S, A, {}};
        for (int h = 0; h < H; ++h)
            for (int s = 0; s < S; ++s)
                for (int a = 0; a < A; ++a)
                    data.samples.push_back({h, s, a, h + 1 < H ? next(h, s, a) : -1, expert.action(h, s)});
        RlpConfig cfg;
        cfg.C = 0.0;
        const auto thetas = sample_thetas(H, S, A, 10, mix64(1003, i));
        const auto est = rlp_run(data, ParamSet::finite(thetas), cfg);
        for (const auto& t : thetas) {
            const auto a = est(t);
            const auto b = ground_truth_reward(m, expert, t);
            double gap = 0.0;
            for (std::size_t c = 0; c < a.r.data().size(); ++c) gap = std::max(gap, std::abs(a.r.data()[c] - b.r.data()[c]));
            worst = std::max(worst, gap);
            ok += gap <= 1e-12;
            ++total;
        }
    }
    return {ok == total, fmt("%d/%d parameters reproduced (max deviation %.3g)", ok, total, worst)};
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Verdict()> run;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "feasibility", 30, feasibility},
        {2, "monotonicity", 120, monotonicity},
        {3, "offline rate", 600, [] { return rate_check(offline_sweep("offline"), false); }},
        {4, "expert-evaluation rate", 600, [] { return rate_check(offline_sweep("offline_expert_eval"), true); }},
        {5, "online pipeline", 600, online_pipeline},
        {6, "metric oracles", 60, metric_oracles},
        {7, "planning with estimated reward", 60, planning},
        {8, "estimator oracles", 60, estimators},
        {9, "hard instances", 30, hard_instances},
        {10, "zero-noise reduction", 10, zero_noise},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.budget_s;
        const bool pass = v.pass && in_time;
        failures += !pass;
        std::printf("criterion %d (%s): %s  %s; %.1f s of %.0f s%s\n", c.id, c.name, pass ? "PASS" : "FAIL",
                    v.detail.c_str(), secs, c.budget_s, in_time ? "" : " (over budget)");
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
