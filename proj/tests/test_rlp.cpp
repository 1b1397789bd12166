#include <doctest.h>

#include <cmath>

#include "irl/instances.hpp"
#include "irl/metrics.hpp"
#include "irl/rlp.hpp"
#include "oracles.hpp"

using namespace irl;

namespace {

TransitionSet pool(int H, int S, int A, std::vector<Sample> samples) {
    return {FeedbackOption::expert_action, H, S, A, std::move(samples)};
}

bool dominated(const RewardTable& lo, const RewardTable& hi) {
    for (std::size_t i = 0; i < lo.r.data().size(); ++i)
        if (lo.r.data()[i] > hi.r.data()[i]) return false;
    return true;
}

} // namespace

TEST_CASE("fit_empirical: normalized counts and zero rows") {
    const auto data = pool(2, 2, 2, {{0, 0, 0, 0, 0}, {0, 0, 0, 0, 0}, {0, 0, 0, 0, 1}, {0, 0, 0, 1, 0}});
    const auto m = fit_empirical(data, RlpConfig{});
    CHECK(m.p_hat(0, 0, 0, 0) == 0.75);
    CHECK(m.p_hat(0, 0, 0, 1) == 0.25);
    for (double x : m.p_hat.row(0, 1, 1)) CHECK(x == 0.0);
    for (double x : m.p_hat.row(1, 0, 0)) CHECK(x == 0.0);
    CHECK(m.expert_hat(0, 0, 0) == 0.75);
    CHECK(m.expert_hat(0, 0, 1) == 0.25);
    CHECK(m.expert_support(0, 0, 1) == 1);
    CHECK(m.expert_support(0, 1, 0) == 0);
    CHECK(m.iota() == doctest::Approx(std::log(8.0 / 0.1)));

    RlpConfig other;
    other.option = FeedbackOption::support_flag;
    CHECK_THROWS_AS(fit_empirical(data, other), ValidationError);
}

TEST_CASE("fit_empirical matches the recount oracle exactly") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const auto p = random_mdp(3, 3, 3, seed);
        const auto option = seed % 2 ? FeedbackOption::support_flag : FeedbackOption::expert_action;
        const auto d = collect_dataset(p.mdp, random_full_support_policy(3, 3, 3, seed + 9),
                                       random_stochastic_expert(3, 3, 3, seed + 7, 2), option, 400, seed);
        RlpConfig cfg;
        cfg.option = option;
        const auto m = fit_empirical(d, cfg);
        const auto ref = oracle::recount(d);
        CHECK(m.p_hat == ref.p_hat);
        CHECK(m.expert_hat == ref.expert_hat);
    }
}

TEST_CASE("fit_empirical: large dataset recovers the kernel") {
    const auto p = random_mdp(3, 3, 2, 21, 10.0);
    const auto d = collect_dataset(p.mdp, Policy::uniform(3, 3, 2), p.expert, FeedbackOption::expert_action, 100'000, 22);
    const auto m = fit_empirical(d, RlpConfig{});
    double worst = 0.0;
    for (int h = 0; h + 1 < 3; ++h)
        for (int s = 0; s < 3; ++s)
            for (int a = 0; a < 2; ++a) {
                if (m.counts.n_sa(h, s, a) == 0) continue;
                double tv = 0.0;
                for (int n = 0; n < 3; ++n) tv += std::abs(m.p_hat(h, s, a, n) - p.mdp.transition(h, s, a, n));
                worst = std::max(worst, 0.5 * tv);
            }
    CHECK(worst <= 0.05);
}

TEST_CASE("bonus_value: closed form values and limits") {
    CHECK(bonus_value(1.0, 1.0, 0, 0.0, 4, 0.1) == 4.0);
    CHECK(bonus_value(2.5, 3.0, 0, 0.0, 4, 0.1) == 10.0);

    const double hand = std::sqrt(2.0 * 4.0 / 100.0) + 5.0 * 2.0 / 100.0 + (0.5 / 5.0) * (1.0 + std::sqrt(2.0 / 100.0));
    CHECK(bonus_value(1.0, 2.0, 100, 4.0, 5, 0.5) == doctest::Approx(hand).epsilon(1e-14));
    CHECK(bonus_value(1.0, 2.0, 100, 4.0, 5, 0.5) == doctest::Approx(0.4970).epsilon(1e-4));

    const double limit = bonus_value(1.0, 2.0, 100'000'000, 0.0, 5, 0.5);
    CHECK(limit == doctest::Approx(0.1).epsilon(1e-3));
    CHECK(limit >= 0.1);

    double prev = bonus_value(1.0, 2.0, 1, 1.0, 5, 0.5);
    for (long n = 2; n < 5000; n += 7) {
        const double b = bonus_value(1.0, 2.0, n, 1.0, 5, 0.5);
        CHECK(b <= prev);
        CHECK(b >= 0.0);
        CHECK(b <= 5.0);
        prev = b;
    }
    CHECK(bonus_value(0.0, 2.0, 3, 1.0, 5, 0.5) == 0.0);
}

TEST_CASE("bonus and estimated_reward on a fitted model") {
    const auto p = random_mdp(3, 3, 2, 31);
    const auto d = collect_dataset(p.mdp, random_full_support_policy(3, 3, 2, 32), p.expert,
                                   FeedbackOption::expert_action, 50'000, 33);
    const auto thetas = sample_thetas(3, 3, 2, 4, 34);
    auto [mapping, model] = rlp_fit(to_transitions(d), ParamSet::finite(thetas), RlpConfig{});
    CHECK(model->config.log_cover == log_cover(ParamSet::finite(thetas), 0.1 / 3));

    const auto zero = RewardParam::zeros(3, 3, 2);
    const auto b = bonus(*model, zero, 0.1);
    const auto r0 = estimated_reward(*model, zero, 0.1);
    for (std::size_t i = 0; i < b.data().size(); ++i) {
        CHECK(r0.r.data()[i] == -b.data()[i]);
        CHECK(r0.r.data()[i] <= 0.0);
    }
    CHECK(r0.declared_bound == 9.0 + 3.0);

    for (const auto& t : thetas) {
        const auto bt = bonus(*model, t, 0.1);
        for (double x : bt.data()) {
            CHECK(x >= 0.0);
            CHECK(x <= 3.0);
        }
        CHECK(mapping(t).r == mapping(t).r);
        CHECK(mapping.origin() == RewardMapping::Origin::estimated);
    }

    const Policy pi = random_full_support_policy(3, 3, 2, 35);
    const auto zero_mapping = ground_truth_mapping(p.mdp, p.expert);
    const std::vector<RewardParam> only{zero};
    CHECK(D_pi_Theta(p.mdp, pi, zero_mapping, mapping, only).value ==
          doctest::Approx(d_pi(p.mdp, pi, RewardTable::zeros(3, 3, 2), r0).value).epsilon(1e-12));
}

TEST_CASE("bonus is C H on unvisited cells") {
    const auto data = pool(3, 2, 2, {{0, 0, 0, 1, 0}, {1, 1, 0, 0, 0}, {2, 0, 0, -1, 0}});
    RlpConfig cfg;
    cfg.C = 2.0;
    const auto m = fit_empirical(data, cfg);
    const auto theta = sample_theta(3, 2, 2, 1);
    const auto b = bonus(m, theta, 0.1);
    CHECK(b(0, 1, 1) == 6.0);
    CHECK(b(2, 1, 0) == 6.0);
}

TEST_CASE("empirical_variance identity") {
    const auto p = random_mdp(3, 4, 2, 41);
    const auto d = collect_dataset(p.mdp, Policy::uniform(3, 4, 2), p.expert, FeedbackOption::expert_action, 300, 42);
    const auto m = fit_empirical(d, RlpConfig{});
    const std::vector<double> f{0.3, -1.2, 2.0, 0.7};
    for (int h = 0; h < 3; ++h)
        for (int s = 0; s < 4; ++s)
            for (int a = 0; a < 2; ++a) {
                double m1 = 0.0, m2 = 0.0;
                for (int n = 0; n < 4; ++n) {
                    m1 += m.p_hat(h, s, a, n) * f[n];
                    m2 += m.p_hat(h, s, a, n) * f[n] * f[n];
                }
                const double v = empirical_variance(m, h, s, a, f);
                CHECK(v >= 0.0);
                CHECK(std::abs(v - std::max(0.0, m2 - m1 * m1)) <= 1e-9);
            }
}

TEST_CASE("zero-noise reduction recovers the true mapping") {
    const int H = 3, S = 3, A = 2;
    Mdp m(H, S, A, 0);
    for (int h = 0; h < H; ++h)
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) m.transition(h, s, a, (2 * s + a + h) % S) = 1.0;
    const Policy expert = random_deterministic_policy(H, S, A, 5);
    std::vector<Sample> samples;
    for (int h = 0; h < H; ++h)
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a)
                samples.push_back({h, s, a, h + 1 < H ? (2 * s + a + h) % S : -1, expert.action(h, s)});
    RlpConfig cfg;
    cfg.C = 0.0;
    const auto thetas = sample_thetas(H, S, A, 20, 6);
    const auto mapping = rlp_run(pool(H, S, A, samples), ParamSet::finite(thetas), cfg);
    for (const auto& t : thetas) {
        const auto est = mapping(t);
        const auto truth = ground_truth_reward(m, expert, t);
        for (std::size_t i = 0; i < est.r.data().size(); ++i)
            CHECK(std::abs(est.r.data()[i] - truth.r.data()[i]) <= 1e-12);
    }
}

TEST_CASE("estimated rewards lie below the true mapping on most seeds") {
    int good = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto p = random_mdp(3, 3, 2, 1000 + seed);
        const auto thetas = sample_thetas(3, 3, 2, 5, seed);
        const auto d = collect_dataset(p.mdp, random_full_support_policy(3, 3, 2, seed), p.expert,
                                       FeedbackOption::expert_action, 2000, seed);
        const auto mapping = rlp_run(d, ParamSet::finite(thetas), RlpConfig{});
        bool all = true;
        for (const auto& t : thetas) all = all && dominated(mapping(t), ground_truth_reward(p.mdp, p.expert, t));
        good += all;
    }
    CHECK(good >= 48);
}

TEST_CASE("RlpConfig validation") {
    RlpConfig c;
    CHECK_NOTHROW(c.validate());
    c.delta = 1.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = RlpConfig{};
    c.eps = -0.1;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = RlpConfig{};
    c.C = -1.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
}
