#include "irl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "irl/environment.hpp"

#ifndef IRL_VERSION
#define IRL_VERSION "unknown"
#endif

namespace irl {

std::string to_string(Scenario scenario) {
    switch (scenario) {
    case Scenario::offline: return "offline";
    case Scenario::offline_expert_eval: return "offline_expert_eval";
    case Scenario::online: return "online";
    case Scenario::transfer: return "transfer";
    }
    return "offline";
}

Scenario scenario_from_string(const std::string& name) {
    for (auto s : {Scenario::offline, Scenario::offline_expert_eval, Scenario::online, Scenario::transfer})
        if (to_string(s) == name) return s;
    throw ValidationError("unknown scenario '" + name + "'");
}

std::string to_string(MetricMode mode) {
    switch (mode) {
    case MetricMode::d_pi: return "d_pi";
    case MetricMode::all_surrogate: return "all_surrogate";
    case MetricMode::all_bruteforce: return "all_bruteforce";
    }
    return "d_pi";
}

MetricMode metric_mode_from_string(const std::string& name) {
    for (auto m : {MetricMode::d_pi, MetricMode::all_surrogate, MetricMode::all_bruteforce})
        if (to_string(m) == name) return m;
    throw ValidationError("unknown metric '" + name + "'");
}

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
    if (!j.is_object()) throw ValidationError("experiment config must be a JSON object");
    ExperimentConfig c;
    try {
        c.scenario = scenario_from_string(j.value("scenario", std::string("offline")));
        c.seed = j.value("seed", c.seed);
        if (j.contains("instance")) {
            const Json& inst = j.at("instance");
            c.mdp_path = inst.value("mdp", c.mdp_path);
            c.expert_path = inst.value("expert", c.expert_path);
            c.horizon = inst.value("H", c.horizon);
            c.states = inst.value("S", c.states);
            c.actions = inst.value("A", c.actions);
            c.instance_seed = inst.value("seed", c.instance_seed);
            c.concentration = inst.value("concentration", c.concentration);
        }
        c.behavior = j.value("behavior", c.behavior);
        c.evaluation = j.value("evaluation", c.evaluation);
        c.k_schedule = j.value("K", c.k_schedule);
        c.seeds = j.value("seeds", c.seeds);
        c.theta_count = j.value("theta_count", c.theta_count);
        c.theta_scale = j.value("theta_scale", c.theta_scale);
        c.delta = j.value("delta", c.delta);
        c.eps = j.value("eps", c.eps);
        c.C = j.value("C", c.C);
        c.option = j.value("option", c.option);
        if (j.contains("metric")) c.metric = metric_mode_from_string(j.at("metric").get<std::string>());
        c.per_stage_episodes = j.value("N", c.per_stage_episodes);
        c.c_xi = j.value("c_xi", c.c_xi);
        c.paper_faithful = j.value("paper_faithful", c.paper_faithful);
        c.transfer_mix = j.value("transfer_mix", c.transfer_mix);
        c.workers = j.value("workers", c.workers);
        c.out = j.value("out", c.out);
        if (j.contains("acceptance")) {
            const Json& a = j.at("acceptance");
            AcceptanceCheck check;
            if (a.contains("slope_min")) check.slope_min = a.at("slope_min").get<prec_t>();
            if (a.contains("slope_max")) check.slope_max = a.at("slope_max").get<prec_t>();
            check.medians_nonincreasing = a.value("medians_nonincreasing", false);
            check.strict = a.value("strict", false);
            if (a.contains("min_monotone_fraction"))
                check.min_monotone_fraction = a.at("min_monotone_fraction").get<prec_t>();
            c.acceptance = check;
        }
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("experiment config: ") + e.what());
    }
    c.validate();
    return c;
}

Json ExperimentConfig::to_json() const {
    Json j = {{"scenario", to_string(scenario)},
              {"seed", seed},
              {"instance",
               {{"mdp", mdp_path},
                {"expert", expert_path},
                {"H", horizon},
                {"S", states},
                {"A", actions},
                {"seed", instance_seed},
                {"concentration", concentration}}},
              {"behavior", behavior},
              {"evaluation", evaluation},
              {"K", k_schedule},
              {"seeds", seeds},
              {"theta_count", theta_count},
              {"theta_scale", theta_scale},
              {"delta", delta},
              {"eps", eps},
              {"C", C},
              {"option", option},
              {"metric", to_string(effective_metric())},
              {"N", per_stage_episodes},
              {"c_xi", c_xi},
              {"paper_faithful", paper_faithful},
              {"transfer_mix", transfer_mix}};
    if (acceptance) {
        Json a = {{"medians_nonincreasing", acceptance->medians_nonincreasing}, {"strict", acceptance->strict}};
        if (acceptance->slope_min) a["slope_min"] = *acceptance->slope_min;
        if (acceptance->slope_max) a["slope_max"] = *acceptance->slope_max;
        if (acceptance->min_monotone_fraction) a["min_monotone_fraction"] = *acceptance->min_monotone_fraction;
        j["acceptance"] = std::move(a);
    }
    return j;
}

void ExperimentConfig::validate() const {
    if (k_schedule.empty()) throw ValidationError("experiment config: empty K schedule");
    if (seeds.empty()) throw ValidationError("experiment config: empty seed list");
    if (std::find(k_schedule.begin(), k_schedule.end(), 0u) != k_schedule.end())
        throw ValidationError("experiment config: K values must be positive");
    if (mdp_path.empty() && (horizon <= 0 || states <= 0 || actions <= 0))
        throw ValidationError("experiment config: instance sizes must be positive");
    if (!mdp_path.empty() && expert_path.empty())
        throw ValidationError("experiment config: a file instance needs an expert policy file");
    if (theta_count <= 0) throw ValidationError("experiment config: theta_count must be positive");
    if (!(theta_scale >= 0.0 && theta_scale <= 1.0)) throw ValidationError("experiment config: theta_scale in [0, 1]");
    if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("experiment config: delta must lie in (0, 1)");
    if (!(eps > 0.0)) throw ValidationError("experiment config: eps must be positive");
    if (!(C >= 0.0)) throw ValidationError("experiment config: C must be nonnegative");
    feedback_option_from_int(option);
    if (behavior != "full_support" && behavior != "uniform" && behavior != "expert")
        throw ValidationError("experiment config: behavior must be full_support, uniform or expert");
    if (evaluation != "expert" && evaluation != "uniform" && evaluation != "behavior")
        throw ValidationError("experiment config: evaluation must be expert, uniform or behavior");
    if (scenario == Scenario::transfer && !(transfer_mix >= 0.0 && transfer_mix <= 1.0))
        throw ValidationError("experiment config: transfer_mix in [0, 1]");
    if (workers < 0) throw ValidationError("experiment config: workers must be nonnegative");
}

MetricMode ExperimentConfig::effective_metric() const {
    if (metric) return *metric;
    return scenario == Scenario::online ? MetricMode::all_surrogate : MetricMode::d_pi;
}

ScenarioFixture build_fixture(const ExperimentConfig& config) {
    ScenarioFixture fx;
    if (!config.mdp_path.empty()) {
        fx.mdp = mdp_from_json(read_json_file(config.mdp_path));
        fx.expert = policy_from_json(read_json_file(config.expert_path));
        check_shapes(fx.mdp, &fx.expert, nullptr);
    } else {
        auto problem = random_mdp(config.horizon, config.states, config.actions, config.instance_seed,
                                  config.concentration);
        fx.mdp = std::move(problem.mdp);
        fx.expert = std::move(problem.expert);
    }
    const int H = fx.mdp.horizon(), S = fx.mdp.states(), A = fx.mdp.actions();

    std::string behavior = config.behavior, evaluation = config.evaluation;
    if (config.scenario == Scenario::offline_expert_eval) behavior = evaluation = "expert";
    if (behavior == "expert")
        fx.behavior = fx.expert;
    else if (behavior == "uniform")
        fx.behavior = Policy::uniform(H, S, A);
    else
        fx.behavior = random_full_support_policy(H, S, A, mix64(config.instance_seed, 2));
    if (evaluation == "expert")
        fx.evaluation = fx.expert;
    else if (evaluation == "uniform")
        fx.evaluation = Policy::uniform(H, S, A);
    else
        fx.evaluation = fx.behavior;

    if (config.scenario == Scenario::transfer) {
        const Mdp other = random_mdp(H, S, A, mix64(config.instance_seed, 7), config.concentration).mdp;
        Mdp target = fx.mdp;
        for (std::size_t i = 0; i < target.kernel().data().size(); ++i)
            target.kernel().data()[i] =
                (1.0 - config.transfer_mix) * fx.mdp.kernel().data()[i] + config.transfer_mix * other.kernel().data()[i];
        fx.target = std::move(target);
    }
    fx.thetas = sample_thetas(H, S, A, config.theta_count, mix64(config.instance_seed, 3), config.theta_scale);
    return fx;
}

std::uint64_t cell_seed(std::uint64_t root, std::uint64_t K, std::uint64_t seed) { return mix64(mix64(root, K), seed); }

bool is_monotone(const RewardMapping& truth, const RewardMapping& estimate, const std::vector<RewardParam>& thetas) {
    for (const auto& theta : thetas) {
        const RewardTable r = truth(theta), r_hat = estimate(theta);
        for (std::size_t i = 0; i < r.r.data().size(); ++i)
            if (r_hat.r.data()[i] > r.r.data()[i] + 1e-12) return false;
    }
    return true;
}

ResultRow run_cell(const ExperimentConfig& config, const ScenarioFixture& fx, std::uint64_t K, std::uint64_t seed) {
    const auto started = std::chrono::steady_clock::now();
    const std::uint64_t cs = cell_seed(config.seed, K, seed);
    const FeedbackOption option = feedback_option_from_int(config.option);
    const ParamSet thetas = ParamSet::finite(fx.thetas);
    const RewardMapping truth = ground_truth_mapping(fx.mdp, fx.expert);

    ResultRow row;
    row.scenario = config.scenario;
    row.K = K;
    row.seed = seed;

    std::optional<RewardMapping> estimate;
    if (config.scenario == Scenario::online) {
        Environment env(fx.mdp, fx.expert, option);
        RleConfig rle;
        rle.per_stage_episodes = config.per_stage_episodes;
        rle.main_episodes = K;
        rle.delta = config.delta;
        rle.eps = config.eps;
        rle.C = config.C;
        rle.c_xi = config.c_xi;
        rle.paper_faithful = config.paper_faithful;
        estimate = rle_run(env, thetas, rle, cs).mapping;
        row.episodes = env.episodes();
    } else {
        const auto data = collect_dataset(fx.mdp, fx.behavior, fx.expert, option, K, cs);
        RlpConfig rlp;
        rlp.delta = config.delta;
        rlp.eps = config.eps;
        rlp.C = config.C;
        rlp.option = option;
        estimate = rlp_run(data, thetas, rlp);
        row.episodes = K;
    }

    const Mdp& metric_mdp = fx.target ? *fx.target : fx.mdp;
    switch (config.effective_metric()) {
    case MetricMode::d_pi: row.metric = D_pi_Theta(metric_mdp, fx.evaluation, truth, *estimate, fx.thetas).value; break;
    case MetricMode::all_surrogate:
        row.metric = D_all_Theta(metric_mdp, truth, *estimate, fx.thetas, DAllMode::surrogate).value;
        break;
    case MetricMode::all_bruteforce:
        row.metric = D_all_Theta(metric_mdp, truth, *estimate, fx.thetas, DAllMode::bruteforce).value;
        break;
    }
    row.monotone = is_monotone(truth, *estimate, fx.thetas);
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    return row;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    const ScenarioFixture fx = build_fixture(config);

    std::vector<std::pair<std::uint64_t, std::uint64_t>> cells;
    for (auto K : config.k_schedule)
        for (auto seed : config.seeds) cells.emplace_back(K, seed);

    ExperimentResult result;
    result.rows.resize(cells.size());
    result.config_hash = config_hash(config);
    result.version = version_string();

    unsigned workers = config.workers > 0 ? static_cast<unsigned>(config.workers) : std::thread::hardware_concurrency();
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(cells.size())));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            try {
                result.rows[i] = run_cell(config, fx, cells[i].first, cells[i].second);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = cells.size();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return result;
}

std::string to_csv(const std::vector<ResultRow>& rows) {
    std::ostringstream out;
    out << "scenario,K,seed,metric,monotone,episodes,wall_ms\n";
    char buf[64];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g", r.metric);
        out << to_string(r.scenario) << ',' << r.K << ',' << r.seed << ',' << buf << ',' << (r.monotone ? 1 : 0) << ','
            << r.episodes << ',';
        std::snprintf(buf, sizeof buf, "%.3f", r.wall_ms);
        out << buf << '\n';
    }
    return out.str();
}

std::vector<std::pair<std::uint64_t, prec_t>> median_by_k(const std::vector<ResultRow>& rows) {
    std::map<std::uint64_t, std::vector<prec_t>> groups;
    for (const auto& r : rows) groups[r.K].push_back(r.metric);
    std::vector<std::pair<std::uint64_t, prec_t>> out;
    for (auto& [K, values] : groups) {
        std::sort(values.begin(), values.end());
        const std::size_t n = values.size();
        out.emplace_back(K, n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]));
    }
    return out;
}

prec_t fit_rate(const std::vector<std::pair<std::uint64_t, prec_t>>& medians) {
    if (medians.size() < 4) throw ValidationError("fit_rate: need at least 4 K values");
    std::vector<prec_t> x, y;
    for (const auto& [K, m] : medians) {
        if (!(m > 0.0) || !std::isfinite(m)) throw ValidationError("fit_rate: medians must be positive and finite");
        x.push_back(std::log(static_cast<prec_t>(K)));
        y.push_back(std::log(m));
    }
    if (std::all_of(y.begin(), y.end(), [&](prec_t v) { return v == y.front(); }))
        throw ValidationError("fit_rate: constant medians");
    const prec_t n = static_cast<prec_t>(x.size());
    prec_t mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    prec_t sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0.0) throw ValidationError("fit_rate: K values must differ");
    return sxy / sxx;
}

prec_t fit_rate(const std::vector<ResultRow>& rows) { return fit_rate(median_by_k(rows)); }

bool medians_nonincreasing(const std::vector<std::pair<std::uint64_t, prec_t>>& medians, bool strict) {
    for (std::size_t i = 1; i < medians.size(); ++i) {
        if (strict ? !(medians[i].second < medians[i - 1].second) : medians[i].second > medians[i - 1].second)
            return false;
    }
    return true;
}

prec_t monotone_fraction(const std::vector<ResultRow>& rows) {
    if (rows.empty()) return 0.0;
    const auto good = std::count_if(rows.begin(), rows.end(), [](const ResultRow& r) { return r.monotone; });
    return static_cast<prec_t>(good) / static_cast<prec_t>(rows.size());
}

AcceptanceOutcome evaluate_acceptance(const AcceptanceCheck& check, const std::vector<ResultRow>& rows) {
    AcceptanceOutcome out;
    const auto medians = median_by_k(rows);
    auto fail = [&](std::string msg) {
        out.passed = false;
        out.messages.push_back(std::move(msg));
    };
    if (check.medians_nonincreasing && !medians_nonincreasing(medians, check.strict))
        fail(check.strict ? "medians not strictly decreasing in K" : "medians increase somewhere in K");
    if (check.slope_min || check.slope_max) {
        try {
            const prec_t slope = fit_rate(medians);
            if (check.slope_min && slope < *check.slope_min) fail("slope " + std::to_string(slope) + " below window");
            if (check.slope_max && slope > *check.slope_max) fail("slope " + std::to_string(slope) + " above window");
        } catch (const ValidationError& e) {
            fail(e.what());
        }
    }
    if (check.min_monotone_fraction && monotone_fraction(rows) < *check.min_monotone_fraction)
        fail("monotone fraction " + std::to_string(monotone_fraction(rows)) + " below threshold");
    return out;
}

Json experiment_summary(const ExperimentConfig& config, const ExperimentResult& result) {
    Json medians = Json::array();
    const auto m = median_by_k(result.rows);
    for (const auto& [K, value] : m) medians.push_back({{"K", K}, {"median", value}});
    Json j = {{"config_hash", result.config_hash},
              {"version", result.version},
              {"config", config.to_json()},
              {"medians", std::move(medians)},
              {"monotone_fraction", monotone_fraction(result.rows)},
              {"slope", nullptr}};
    try {
        j["slope"] = fit_rate(m);
    } catch (const ValidationError&) {
    }
    if (config.acceptance) {
        const auto outcome = evaluate_acceptance(*config.acceptance, result.rows);
        j["acceptance"] = {{"passed", outcome.passed}, {"messages", outcome.messages}};
    }
    return j;
}

std::string config_hash(const ExperimentConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : config.to_json().dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string version_string() { return IRL_VERSION; }

} // namespace irl
