#include <doctest.h>

#include <cmath>

#include "irl/explore.hpp"
#include "irl/instances.hpp"

using namespace irl;

namespace {

OccupancyOracle sampled_oracle(const IrlProblem& p, std::uint64_t N, prec_t xi, std::uint64_t seed) {
    Environment env(p.mdp, p.expert, FeedbackOption::expert_action);
    return explore_run(env, {N, 1000, xi}, seed).oracle;
}

// Two states; state 1 is reachable only through action 1 at step 0.
Mdp gated_chain(int H) {
    Mdp m(H, 2, 2, 0);
    for (int h = 0; h < H; ++h) {
        m.transition(h, 0, 0, 0) = 1.0;
        m.transition(h, 0, 1, 1) = 1.0;
        m.transition(h, 1, 0, 1) = 1.0;
        m.transition(h, 1, 1, 1) = 1.0;
    }
    return m;
}

} // namespace

TEST_CASE("occupancy_hat: exact oracle reproduces the true occupancy") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto p = random_mdp(4, 3, 2, seed);
        const auto oracle = OccupancyOracle::exact(p.mdp);
        const Policy pi = random_full_support_policy(4, 3, 2, seed + 10);
        const auto est = occupancy_hat(oracle, pi);
        const auto ref = occupancy(p.mdp, pi).state_action;
        for (std::size_t i = 0; i < est.data().size(); ++i) CHECK(std::abs(est.data()[i] - ref.data()[i]) <= 1e-12);
    }
}

TEST_CASE("occupancy_hat: fully truncated oracle keeps only the first step") {
    const auto p = random_mdp(3, 3, 2, 1);
    const auto oracle = sampled_oracle(p, 5, 1e9, 2);
    const Policy pi = Policy::uniform(3, 3, 2);
    const auto est = occupancy_hat(oracle, pi);
    for (int s = 0; s < 3; ++s)
        for (int a = 0; a < 2; ++a) {
            CHECK(est(0, s, a) == oracle.initial[s] * 0.5);
            for (int h = 1; h < 3; ++h) CHECK(est(h, s, a) == 0.0);
        }
}

TEST_CASE("occupancy_hat is linear in mixture weights") {
    const auto p = random_mdp(3, 3, 2, 3);
    const auto oracle = sampled_oracle(p, 200, 5.0, 4);
    const Policy a = random_deterministic_policy(3, 3, 2, 5);
    const Policy b = random_deterministic_policy(3, 3, 2, 6);
    PolicyMixture mix{{a, b}, {0.5, 0.5}};
    CHECK_NOTHROW(mix.validate());
    const auto da = occupancy_hat(oracle, a);
    const auto db = occupancy_hat(oracle, b);
    const auto dm = occupancy_hat(oracle, mix);
    for (std::size_t i = 0; i < dm.data().size(); ++i)
        CHECK(std::abs(dm.data()[i] - 0.5 * (da.data()[i] + db.data()[i])) <= 1e-12);

    PolicyMixture blended = PolicyMixture::single(a);
    blended.blend(b, 0.25);
    blended.blend(a, 0.5);
    REQUIRE(blended.atoms.size() == 2);
    CHECK(blended.weights[0] == doctest::Approx(0.375 + 0.5));
    CHECK(blended.weights[1] == doctest::Approx(0.125));
}

TEST_CASE("build_augmented: rewards, row sums, absorbing state") {
    const auto p = random_mdp(3, 3, 2, 7);
    const auto oracle = sampled_oracle(p, 100, 3.0, 8);
    const Table3<prec_t> zero(3, 3, 2, 0.0);
    for (int h = 0; h < 3; ++h) {
        const auto aug = build_augmented(oracle, FwMode::per_stage(h), zero, 1000);
        CHECK(aug.mdp.states() == 4);
        CHECK_NOTHROW(validate_mdp(aug.mdp));
        for (int t = 0; t < 3; ++t)
            for (int s = 0; s < 4; ++s)
                for (int a = 0; a < 2; ++a) {
                    double total = 0.0;
                    for (double x : aug.mdp.row(t, s, a)) total += x;
                    CHECK(std::abs(total - 1.0) <= 1e-15);
                    const double expected = (t == h && s < 3) ? 3000.0 : 0.0;
                    CHECK(aug.reward(t, s, a) == doctest::Approx(expected).epsilon(1e-12));
                }
        for (int t = 0; t < 3; ++t)
            for (int a = 0; a < 2; ++a) CHECK(aug.mdp.transition(t, 3, a, 3) == 1.0);
    }

    const auto exact = OccupancyOracle::exact(p.mdp);
    for (int h = 0; h < 3; ++h) {
        const auto aug = build_augmented(exact, FwMode::per_stage(h), zero, 1000);
        const auto occ = occupancy(aug.mdp, Policy::uniform(3, 4, 2));
        for (int t = 0; t <= h; ++t) CHECK(occ.state(t, 3) <= 1e-15);
    }
}

TEST_CASE("Frank-Wolfe step size and early exit") {
    CHECK(fw_step_size(8.0, 4.0) == doctest::Approx(1.0 / 7.0).epsilon(1e-15));

    Mdp one(2, 1, 1, 0);
    one.transition(0, 0, 0, 0) = 1.0;
    one.transition(1, 0, 0, 0) = 1.0;
    const auto res = fw_solve(OccupancyOracle::exact(one), 100, FwMode::final_mode());
    CHECK(res.converged);
    CHECK(res.iterations == 0);
    CHECK(res.mixture.atoms.size() == 1);
    CHECK(res.max_iterations == static_cast<int>(std::floor(50.0 * 2 * std::log(200.0))));
}

TEST_CASE("Frank-Wolfe terminates through the g-test on small exact instances") {
    int nonmonotone = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto p = random_mdp(2, 2, 2, seed);
        const auto oracle = OccupancyOracle::exact(p.mdp);
        const auto res = fw_solve(oracle, 1000, FwMode::final_mode());
        CHECK(res.converged);
        CHECK(res.iterations <= res.max_iterations);
        const auto mix_occ = occupancy_hat(oracle, res.mixture);
        double worst = 0.0;
        for (std::uint64_t i = 0; i < 16; ++i)
            worst = std::max(worst, g_functional(occupancy_hat(oracle, decode_deterministic_policy(i, 2, 2, 2)), mix_occ,
                                                 FwMode::final_mode(), 1000));
        CHECK(worst <= 2.0 * 8 + 1e-6);
        for (std::size_t t = 1; t < res.objective.size(); ++t) nonmonotone += res.objective[t] < res.objective[t - 1] - 1e-9;
    }
    CHECK(nonmonotone == 0);
}

TEST_CASE("coverage certificate: self coverage, post-FW bound, adversarial mixture") {
    const auto p = random_mdp(3, 3, 2, 11);
    const auto exact = OccupancyOracle::exact(p.mdp);
    const Policy pi = random_deterministic_policy(3, 3, 2, 12);
    CHECK(coverage_certificate(exact, PolicyMixture::single(pi), {pi}, 1000) == doctest::Approx(18.0).epsilon(1e-12));

    const auto res = fw_solve(exact, 1000, FwMode::final_mode());
    std::vector<Policy> sample;
    for (std::uint64_t i = 0; i < 100; ++i) sample.push_back(random_deterministic_policy(3, 3, 2, 100 + i));
    CHECK(coverage_certificate(exact, res.mixture, sample, 1000) <= 2.0 * 18);

    const Mdp gate = gated_chain(3);
    const auto gate_oracle = OccupancyOracle::exact(gate);
    const double bad = coverage_certificate(gate_oracle, PolicyMixture::single(Policy::constant(3, 2, 2, 0)),
                                            {Policy::constant(3, 2, 2, 1)}, 1000);
    CHECK(bad > 2.0 * 12);
}

TEST_CASE("explore_run: episode accounting, thresholds, coverage") {
    const auto p = random_mdp(3, 3, 2, 21);
    Environment env(p.mdp, p.expert, FeedbackOption::expert_action);
    const auto out = explore_run(env, {400, 1024, 2.0}, 22);
    CHECK(out.episodes == 400 + 2 * 400);
    CHECK(env.episodes() == out.episodes);
    CHECK(out.stage_runs.size() == 2);
    CHECK_FALSE(out.degenerate);
    double total = 0.0;
    for (double x : out.oracle.initial) total += x;
    CHECK(total == doctest::Approx(1.0));
    std::vector<Policy> sample;
    for (std::uint64_t i = 0; i < 100; ++i) sample.push_back(random_deterministic_policy(3, 3, 2, 200 + i));
    CHECK(coverage_certificate(out.oracle, out.behavior, sample, 1024) <= 2.0 * 18);

    Environment again(p.mdp, p.expert, FeedbackOption::expert_action);
    const auto repeat = explore_run(again, {400, 1024, 2.0}, 22);
    CHECK(repeat.oracle.kernel == out.oracle.kernel);
    CHECK(repeat.behavior.weights == out.behavior.weights);

    CHECK(exploration_threshold(2, 2, 2, 0.1, 1.0) == doctest::Approx(512.0 * std::log(800.0)));
}

TEST_CASE("explore_run: starved budget truncates every kernel") {
    const auto p = random_mdp(3, 3, 2, 31);
    Environment env(p.mdp, p.expert, FeedbackOption::expert_action);
    const auto out = explore_run(env, {10, 100, 50.0}, 32);
    CHECK(out.degenerate);
    for (double f : out.truncation_fraction) CHECK(f == 1.0);
    for (double x : out.oracle.kernel.data()) CHECK(x == 0.0);
}

TEST_CASE("explore_run on a single-state environment") {
    Mdp one(3, 1, 2, 0);
    for (int h = 0; h < 3; ++h)
        for (int a = 0; a < 2; ++a) one.transition(h, 0, a, 0) = 1.0;
    Environment env(one, Policy::constant(3, 1, 2, 0), FeedbackOption::expert_action);
    const auto out = explore_run(env, {50, 100, 1.0}, 1);
    CHECK(out.oracle.initial[0] == 1.0);
    std::vector<Policy> all;
    for (std::uint64_t i = 0; i < 8; ++i) all.push_back(decode_deterministic_policy(i, 3, 1, 2));
    CHECK(coverage_certificate(out.oracle, out.behavior, all, 100) <= 2.0 * 6);
}
