#include "irl/explore.hpp"

#include <algorithm>
#include <cmath>

namespace irl {

OccupancyOracle OccupancyOracle::exact(const Mdp& mdp) {
    OccupancyOracle oracle;
    oracle.horizon = mdp.horizon();
    oracle.states = mdp.states();
    oracle.actions = mdp.actions();
    oracle.initial.assign(static_cast<std::size_t>(mdp.states()), 0.0);
    oracle.initial[static_cast<std::size_t>(mdp.initial_state())] = 1.0;
    oracle.kernel = mdp.kernel();
    oracle.visits = Table3<long>(mdp.horizon(), mdp.states(), mdp.actions(), 0);
    return oracle;
}

PolicyMixture PolicyMixture::single(Policy policy) {
    PolicyMixture m;
    m.atoms.push_back(std::move(policy));
    m.weights.push_back(1.0);
    return m;
}

void PolicyMixture::validate() const {
    if (atoms.empty() || atoms.size() != weights.size()) throw ValidationError("PolicyMixture: malformed");
    prec_t total = 0.0;
    for (prec_t w : weights) {
        if (!(w >= 0.0)) throw ValidationError("PolicyMixture: negative weight");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ValidationError("PolicyMixture: weights do not sum to one");
}

const Policy& PolicyMixture::draw(Rng& rng) const {
    if (atoms.size() == 1) return atoms.front();
    return atoms[static_cast<std::size_t>(rng.categorical(weights))];
}

void PolicyMixture::blend(const Policy& atom, prec_t alpha) {
    for (prec_t& w : weights) w *= 1.0 - alpha;
    const auto it = std::find(atoms.begin(), atoms.end(), atom);
    if (it != atoms.end()) {
        weights[static_cast<std::size_t>(it - atoms.begin())] += alpha;
    } else {
        atoms.push_back(atom);
        weights.push_back(alpha);
    }
}

Table3<prec_t> occupancy_hat(const OccupancyOracle& oracle, const Policy& policy) {
    const int H = oracle.horizon, S = oracle.states, A = oracle.actions;
    if (policy.horizon() != H || policy.states() != S || policy.actions() != A)
        throw ValidationError("occupancy_hat: policy shape mismatch");
    Table3<prec_t> d(H, S, A, 0.0);
    std::vector<prec_t> ds(oracle.initial);
    std::vector<prec_t> next(static_cast<std::size_t>(S), 0.0);
    for (int h = 0; h < H; ++h) {
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) d(h, s, a) = ds[static_cast<std::size_t>(s)] * policy(h, s, a);
        if (h + 1 == H) break;
        std::fill(next.begin(), next.end(), 0.0);
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) {
                const prec_t w = d(h, s, a);
                if (w == 0.0) continue;
                const auto row = oracle.kernel.row(h, s, a);
                for (int j = 0; j < S; ++j) next[static_cast<std::size_t>(j)] += w * row[j];
            }
        ds.swap(next);
    }
    return d;
}

Table3<prec_t> occupancy_hat(const OccupancyOracle& oracle, const PolicyMixture& mixture) {
    mixture.validate();
    Table3<prec_t> total(oracle.horizon, oracle.states, oracle.actions, 0.0);
    for (std::size_t i = 0; i < mixture.atoms.size(); ++i) {
        const auto d = occupancy_hat(oracle, mixture.atoms[i]);
        for (std::size_t j = 0; j < d.data().size(); ++j) total.data()[j] += mixture.weights[i] * d.data()[j];
    }
    return total;
}

namespace {

prec_t smoothing(std::uint64_t episodes, int horizon) {
    return 1.0 / (static_cast<prec_t>(episodes) * horizon);
}

Policy restrict_to_real_states(const Policy& augmented, int states) {
    Table3<prec_t> probs(augmented.horizon(), states, augmented.actions(), 0.0);
    for (int h = 0; h < augmented.horizon(); ++h)
        for (int s = 0; s < states; ++s)
            for (int a = 0; a < augmented.actions(); ++a) probs(h, s, a) = augmented(h, s, a);
    return Policy(std::move(probs));
}

} // namespace

AugmentedProblem build_augmented(const OccupancyOracle& oracle, FwMode mode, const Table3<prec_t>& mixture_occ,
                                 std::uint64_t episodes) {
    const int H = oracle.horizon, S = oracle.states, A = oracle.actions;
    if (episodes == 0) throw ValidationError("build_augmented: K must be positive");
    if (mode.stage && (*mode.stage < 0 || *mode.stage >= H)) throw ValidationError("build_augmented: stage out of range");
    const int absorbing = S;
    const int start = static_cast<int>(std::max_element(oracle.initial.begin(), oracle.initial.end()) -
                                       oracle.initial.begin());
    Mdp mdp(H, S + 1, A, start);
    RewardTable reward{Table3<prec_t>(H, S + 1, A, 0.0), static_cast<prec_t>(episodes) * H};
    const prec_t floor = smoothing(episodes, H);

    for (int h = 0; h < H; ++h) {
        const bool use_kernel = !mode.stage || h <= *mode.stage;
        for (int a = 0; a < A; ++a) mdp.transition(h, absorbing, a, absorbing) = 1.0;
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) {
                if (use_kernel) {
                    const auto src = oracle.kernel.row(h, s, a);
                    prec_t mass = 0.0;
                    for (int j = 0; j < S; ++j) {
                        mdp.transition(h, s, a, j) = src[j];
                        mass += src[j];
                    }
                    mdp.transition(h, s, a, absorbing) = std::max(0.0, 1.0 - mass);
                } else {
                    mdp.transition(h, s, a, absorbing) = 1.0;
                }
                if (mode.covers(h)) reward(h, s, a) = 1.0 / (floor + mixture_occ(h, s, a));
            }
    }
    return {std::move(mdp), std::move(reward)};
}

AugmentedProblem build_augmented(const OccupancyOracle& oracle, FwMode mode, const PolicyMixture& mixture,
                                 std::uint64_t episodes) {
    return build_augmented(oracle, mode, occupancy_hat(oracle, mixture), episodes);
}

prec_t g_functional(const Table3<prec_t>& policy_occ, const Table3<prec_t>& mixture_occ, FwMode mode,
                    std::uint64_t episodes) {
    const prec_t floor = smoothing(episodes, policy_occ.horizon());
    prec_t g = 0.0;
    for (int h = 0; h < policy_occ.horizon(); ++h) {
        if (!mode.covers(h)) continue;
        for (int s = 0; s < policy_occ.states(); ++s)
            for (int a = 0; a < policy_occ.actions(); ++a)
                g += (floor + policy_occ(h, s, a)) / (floor + mixture_occ(h, s, a));
    }
    return g;
}

prec_t fw_objective(const Table3<prec_t>& mixture_occ, FwMode mode, std::uint64_t episodes) {
    const prec_t floor = smoothing(episodes, mixture_occ.horizon());
    prec_t total = 0.0;
    for (int h = 0; h < mixture_occ.horizon(); ++h) {
        if (!mode.covers(h)) continue;
        for (int s = 0; s < mixture_occ.states(); ++s)
            for (int a = 0; a < mixture_occ.actions(); ++a) total += std::log(floor + mixture_occ(h, s, a));
    }
    return total;
}

prec_t fw_step_size(prec_t g, prec_t cells) { return (g / cells - 1.0) / (g - 1.0); }

FwResult fw_solve(const OccupancyOracle& oracle, std::uint64_t episodes, FwMode mode) {
    if (episodes == 0) throw ValidationError("fw_solve: K must be positive");
    const int H = oracle.horizon, S = oracle.states, A = oracle.actions;
    const prec_t cells = mode.cells(H, S, A);

    FwResult result;
    result.max_iterations =
        static_cast<int>(std::floor(50.0 * cells * std::log(static_cast<prec_t>(episodes) * H)));
    result.mixture = PolicyMixture::single(Policy::constant(H, S, A, 0));
    Table3<prec_t> mix_occ = occupancy_hat(oracle, result.mixture.atoms.front());
    result.objective.push_back(fw_objective(mix_occ, mode, episodes));

    for (int t = 0; t <= result.max_iterations; ++t) {
        const auto problem = build_augmented(oracle, mode, mix_occ, episodes);
        const Policy candidate = restrict_to_real_states(optimal_policy(problem.mdp, problem.reward).policy, S);
        const auto cand_occ = occupancy_hat(oracle, candidate);
        const prec_t g = g_functional(cand_occ, mix_occ, mode, episodes);
        result.final_g = g;
        if (g <= 2.0 * cells) {
            result.converged = true;
            break;
        }
        const prec_t alpha = fw_step_size(g, cells);
        result.mixture.blend(candidate, alpha);
        for (std::size_t i = 0; i < mix_occ.data().size(); ++i)
            mix_occ.data()[i] = (1.0 - alpha) * mix_occ.data()[i] + alpha * cand_occ.data()[i];
        result.objective.push_back(fw_objective(mix_occ, mode, episodes));
        result.iterations = t + 1;
    }
    return result;
}

prec_t exploration_threshold(int horizon, int states, int actions, prec_t delta, prec_t c_xi) {
    const prec_t hsa = static_cast<prec_t>(horizon) * states * actions;
    return c_xi * hsa * hsa * hsa * std::log(10.0 * hsa / delta);
}

ExploreResult explore_run(Environment& env, const ExploreConfig& config, std::uint64_t seed) {
    if (config.per_stage_episodes == 0 || config.main_episodes == 0)
        throw ValidationError("explore_run: N and K must be positive");
    const int H = env.horizon(), S = env.states(), A = env.actions();
    const std::uint64_t N = config.per_stage_episodes;
    const std::uint64_t start_count = env.episodes();

    ExploreResult out;
    OccupancyOracle& oracle = out.oracle;
    oracle.horizon = H;
    oracle.states = S;
    oracle.actions = A;
    oracle.initial.assign(static_cast<std::size_t>(S), 0.0);
    oracle.kernel = Kernel(H, S, A);
    oracle.visits = Table3<long>(H, S, A, 0);
    oracle.xi = config.xi;
    oracle.per_stage_episodes = N;

    for (std::uint64_t n = 0; n < N; ++n) {
        Rng rng(mix64(mix64(seed, 0), n));
        oracle.initial[static_cast<std::size_t>(env.draw_initial_state(rng))] += 1.0;
    }
    for (prec_t& p : oracle.initial) p /= static_cast<prec_t>(N);

    bool any_kept = false;
    for (int h = 0; h + 1 < H; ++h) {
        out.stage_runs.push_back(fw_solve(oracle, config.main_episodes, FwMode::per_stage(h)));
        const PolicyMixture& explore_policy = out.stage_runs.back().mixture;
        for (std::uint64_t n = 0; n < N; ++n) {
            Rng rng(mix64(mix64(seed, static_cast<std::uint64_t>(h) + 1), n));
            const Policy& atom = explore_policy.draw(rng);
            const auto samples = env.rollout(atom, h + 1, rng);
            const Sample& x = samples.back();
            ++oracle.visits(h, x.state, x.action);
            oracle.kernel(h, x.state, x.action, x.next_state) += 1.0;
        }
        long truncated = 0;
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) {
                const long n = oracle.visits(h, s, a);
                auto row = oracle.kernel.row(h, s, a);
                if (static_cast<prec_t>(n) > config.xi) {
                    for (prec_t& p : row) p /= static_cast<prec_t>(std::max<long>(n, 1));
                    any_kept = true;
                } else {
                    std::fill(row.begin(), row.end(), 0.0);
                    ++truncated;
                }
            }
        out.truncation_fraction.push_back(static_cast<prec_t>(truncated) / (static_cast<prec_t>(S) * A));
    }
    out.degenerate = H > 1 && !any_kept;

    out.final_run = fw_solve(oracle, config.main_episodes, FwMode::final_mode());
    out.behavior = out.final_run.mixture;
    out.episodes = env.episodes() - start_count;
    return out;
}

prec_t coverage_certificate(const OccupancyOracle& oracle, const PolicyMixture& mixture,
                            const std::vector<Policy>& policies, std::uint64_t episodes) {
    if (policies.empty()) throw ValidationError("coverage_certificate: no policies given");
    const auto mix_occ = occupancy_hat(oracle, mixture);
    prec_t worst = 0.0;
    for (const auto& pi : policies)
        worst = std::max(worst, g_functional(occupancy_hat(oracle, pi), mix_occ, FwMode::final_mode(), episodes));
    return worst;
}

} // namespace irl
