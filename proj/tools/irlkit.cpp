// irlkit: command line front end of the irl library.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "irl/environment.hpp"
#include "irl/harness.hpp"
#include "irl/instances.hpp"
#include "irl/io.hpp"
#include "irl/metrics.hpp"
#include "irl/rle.hpp"
#include "irl/rlp.hpp"

namespace {

using irl::Json;
using irl::prec_t;

constexpr int kExitValidation = 2;
constexpr int kExitAcceptance = 3;

struct Globals {
    std::uint64_t seed = 0;
    std::string config;
    std::string out;
    bool paper_faithful = false;
};

void emit(const Globals& g, const std::string& text) {
    if (g.out.empty())
        std::cout << text;
    else
        irl::write_text_file(g.out, text);
}

Json load_config(const Globals& g) { return g.config.empty() ? Json::object() : irl::read_json_file(g.config); }

/// Takes `key` from the config file unless the flag was given explicitly.
template <typename T>
void from_config(const Json& cfg, const CLI::Option* opt, const char* key, T& value) {
    if (opt->count() == 0 && cfg.contains(key)) value = cfg.at(key).get<T>();
}

struct Bundle {
    irl::Mdp mdp;
    irl::Policy expert;
    std::optional<irl::Policy> behavior;
    std::optional<irl::Policy> evaluation;
};

/// Instance bundle: {"mdp":..., "expert":..., "behavior"?, "evaluation"?}.
Bundle load_bundle(const std::string& path) {
    const Json j = irl::read_json_file(path);
    if (!j.contains("mdp") || !j.contains("expert"))
        throw irl::ValidationError(path + ": instance needs \"mdp\" and \"expert\"");
    Bundle b{irl::mdp_from_json(j.at("mdp")), irl::policy_from_json(j.at("expert")), {}, {}};
    irl::check_shapes(b.mdp, &b.expert, nullptr);
    if (j.contains("behavior")) b.behavior = irl::policy_from_json(j.at("behavior"));
    if (j.contains("evaluation")) b.evaluation = irl::policy_from_json(j.at("evaluation"));
    return b;
}

/// A named policy (expert, uniform, full_support, behavior, evaluation) or a policy file.
irl::Policy resolve_policy(const std::string& spec, const Bundle& b, std::uint64_t seed) {
    const int H = b.mdp.horizon(), S = b.mdp.states(), A = b.mdp.actions();
    if (spec == "expert") return b.expert;
    if (spec == "uniform") return irl::Policy::uniform(H, S, A);
    if (spec == "full_support") return irl::random_full_support_policy(H, S, A, seed);
    if (spec == "behavior" || spec == "evaluation") {
        const auto& p = spec == "behavior" ? b.behavior : b.evaluation;
        if (!p) throw irl::ValidationError("instance has no " + spec + " policy");
        return *p;
    }
    irl::Policy p = irl::policy_from_json(irl::read_json_file(spec));
    irl::check_shapes(b.mdp, &p, nullptr);
    return p;
}

std::vector<irl::RewardParam> resolve_thetas(const std::string& file, int count, const Bundle& b, std::uint64_t seed) {
    if (!file.empty()) {
        const auto set = irl::param_set_from_json(irl::read_json_file(file));
        if (set.kind != irl::ParamSet::Kind::finite_list)
            throw irl::ValidationError("a finite parameter list is required here");
        return set.members;
    }
    if (count <= 0) throw irl::ValidationError("--theta-count must be positive");
    return irl::sample_thetas(b.mdp.horizon(), b.mdp.states(), b.mdp.actions(), count, seed);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

struct RlpFlags {
    prec_t delta = 0.1;
    prec_t eps = 0.1;
    prec_t C = 1.0;
    int option = 1;
    CLI::Option* delta_opt = nullptr;
    CLI::Option* eps_opt = nullptr;
    CLI::Option* C_opt = nullptr;
    CLI::Option* option_opt = nullptr;

    void add(CLI::App* cmd) {
        delta_opt = cmd->add_option("--delta", delta, "confidence level");
        eps_opt = cmd->add_option("--eps", eps, "target accuracy");
        C_opt = cmd->add_option("--C", C, "bonus constant");
        option_opt = cmd->add_option("--option", option, "expert feedback option (1 or 2)");
    }
    void merge(const Json& cfg) {
        from_config(cfg, delta_opt, "delta", delta);
        from_config(cfg, eps_opt, "eps", eps);
        from_config(cfg, C_opt, "C", C);
        from_config(cfg, option_opt, "option", option);
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tabular inverse reinforcement learning toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "root seed");
    app.add_option("--config", g.config, "JSON configuration file");
    app.add_option("--out", g.out, "output path (stdout when omitted)");
    app.add_flag("--paper-faithful", g.paper_faithful, "literal constants for xi and the N schedule");

    // gen
    auto* gen = app.add_subcommand("gen", "random MDP with an optimal deterministic expert");
    int gen_H = 4, gen_S = 4, gen_A = 3;
    prec_t gen_conc = 1.0;
    std::string gen_behavior;
    gen->add_option("--H", gen_H);
    gen->add_option("--S", gen_S);
    gen->add_option("--A", gen_A);
    gen->add_option("--concentration", gen_conc, "Dirichlet concentration");
    gen->add_option("--behavior", gen_behavior, "also emit a behavior policy: uniform | full_support");

    // collect
    auto* collect = app.add_subcommand("collect", "offline dataset as JSONL");
    std::string col_instance, col_behavior = "behavior";
    int col_option = 1;
    std::uint64_t col_K = 1000;
    collect->add_option("--instance", col_instance, "instance bundle JSON")->required();
    collect->add_option("--behavior", col_behavior, "policy name or file");
    collect->add_option("--option", col_option, "expert feedback option (1 or 2)");
    collect->add_option("--K", col_K, "episodes");

    // rlp
    auto* rlp = app.add_subcommand("rlp", "offline IRL on a dataset");
    std::string rlp_instance, rlp_data, rlp_thetas, rlp_eval = "expert";
    int rlp_theta_count = 10;
    RlpFlags rlp_flags;
    rlp->add_option("--instance", rlp_instance, "instance bundle JSON")->required();
    rlp->add_option("--data", rlp_data, "dataset JSONL")->required();
    rlp->add_option("--thetas", rlp_thetas, "ParamSet JSON (finite list)");
    rlp->add_option("--theta-count", rlp_theta_count, "sampled parameters when --thetas is absent");
    rlp->add_option("--eval", rlp_eval, "evaluation policy for the reported D^pi metric");
    rlp_flags.add(rlp);

    // rle
    auto* rle = app.add_subcommand("rle", "online IRL against a simulated environment");
    std::string rle_instance, rle_thetas;
    int rle_theta_count = 10;
    std::uint64_t rle_K = 1024, rle_N = 0;
    prec_t rle_cxi = irl::kDefaultXiConstant;
    RlpFlags rle_flags;
    rle->add_option("--instance", rle_instance, "instance bundle JSON")->required();
    rle->add_option("--thetas", rle_thetas, "ParamSet JSON (finite list)");
    rle->add_option("--theta-count", rle_theta_count, "sampled parameters when --thetas is absent");
    auto* rle_K_opt = rle->add_option("--K", rle_K, "main episodes");
    auto* rle_N_opt = rle->add_option("--N", rle_N, "exploration episodes per stage (0 = default)");
    auto* rle_cxi_opt = rle->add_option("--c-xi", rle_cxi, "threshold constant");
    rle_flags.add(rle);

    // metric
    auto* metric = app.add_subcommand("metric", "distance between two rewards, or a coefficient");
    std::string met_instance, met_kind = "d_pi", met_r1, met_r2, met_policy = "expert", met_policy2 = "uniform",
                                 met_target;
    metric->add_option("--instance", met_instance, "instance bundle JSON")->required();
    metric->add_option("--kind", met_kind,
                       "d_pi | all_bruteforce | all_surrogate | concentrability | weak_transferability | "
                       "transferability");
    metric->add_option("--r1", met_r1, "reward JSON");
    metric->add_option("--r2", met_r2, "reward JSON");
    metric->add_option("--policy", met_policy, "policy (d_pi, evaluation or source policy)");
    metric->add_option("--policy2", met_policy2, "behavior or target policy");
    metric->add_option("--target", met_target, "target instance bundle for transferability");

    // experiment
    auto* experiment = app.add_subcommand("experiment", "sweep over K and seeds; CSV output");
    int exp_workers = 0;
    auto* exp_workers_opt = experiment->add_option("--workers", exp_workers, "worker threads (overrides config)");

    // hard
    auto* hard = app.add_subcommand("hard", "hard-instance generator");
    int hard_H = 2, hard_S = 4, hard_A = 2, hard_istar = 0;
    prec_t hard_eps = 0.25, hard_cstar = 2.0;
    bool hard_offline = false;
    hard->add_option("--H", hard_H);
    hard->add_option("--S", hard_S);
    hard->add_option("--A", hard_A);
    hard->add_option("--eps-prime", hard_eps);
    hard->add_option("--c-star", hard_cstar);
    hard->add_option("--i-star", hard_istar);
    hard->add_flag("--offline", hard_offline, "emit behavior/evaluation policies too");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (*gen) {
            auto problem = irl::random_mdp(gen_H, gen_S, gen_A, g.seed, gen_conc);
            Json j = {{"mdp", irl::mdp_to_json(problem.mdp)}, {"expert", irl::policy_to_json(problem.expert)}};
            if (gen_behavior == "uniform")
                j["behavior"] = irl::policy_to_json(irl::Policy::uniform(gen_H, gen_S, gen_A));
            else if (gen_behavior == "full_support")
                j["behavior"] =
                    irl::policy_to_json(irl::random_full_support_policy(gen_H, gen_S, gen_A, irl::mix64(g.seed, 2)));
            else if (!gen_behavior.empty())
                throw irl::ValidationError("--behavior must be uniform or full_support");
            emit(g, dump(j));
            return 0;
        }

        if (*collect) {
            const Bundle b = load_bundle(col_instance);
            const irl::Policy pi_b = resolve_policy(col_behavior, b, irl::mix64(g.seed, 2));
            auto data = irl::collect_dataset(b.mdp, pi_b, b.expert, irl::feedback_option_from_int(col_option), col_K,
                                             g.seed);
            std::ostringstream out;
            irl::write_dataset_jsonl(out, data);
            emit(g, out.str());
            return 0;
        }

        if (*rlp) {
            const Json cfg = load_config(g);
            rlp_flags.merge(cfg);
            const Bundle b = load_bundle(rlp_instance);
            std::ifstream in(rlp_data);
            if (!in) throw irl::ValidationError("cannot open " + rlp_data);
            const auto option = irl::feedback_option_from_int(rlp_flags.option);
            const auto data = irl::read_dataset_jsonl(in, option, b.mdp.horizon(), b.mdp.states(), b.mdp.actions());
            const auto thetas = resolve_thetas(rlp_thetas, rlp_theta_count, b, irl::mix64(g.seed, 3));
            irl::RlpConfig rc;
            rc.delta = rlp_flags.delta;
            rc.eps = rlp_flags.eps;
            rc.C = rlp_flags.C;
            rc.option = option;
            auto [mapping, model] = irl::rlp_fit(irl::to_transitions(data), irl::ParamSet::finite(thetas), rc);
            const auto truth = irl::ground_truth_mapping(b.mdp, b.expert);
            const irl::Policy eval = resolve_policy(rlp_eval, b, irl::mix64(g.seed, 2));
            Json rewards = Json::array();
            for (const auto& theta : thetas) rewards.push_back(irl::reward_to_json(mapping(theta)));
            const Json j = {{"model", irl::rlp_model_to_json(*model)},
                            {"rewards", std::move(rewards)},
                            {"D_pi_Theta", irl::metric_to_json(irl::D_pi_Theta(b.mdp, eval, truth, mapping, thetas))},
                            {"monotone", irl::is_monotone(truth, mapping, thetas)}};
            emit(g, dump(j));
            return 0;
        }

        if (*rle) {
            const Json cfg = load_config(g);
            rle_flags.merge(cfg);
            from_config(cfg, rle_K_opt, "K", rle_K);
            from_config(cfg, rle_N_opt, "N", rle_N);
            from_config(cfg, rle_cxi_opt, "c_xi", rle_cxi);
            const Bundle b = load_bundle(rle_instance);
            const auto thetas = resolve_thetas(rle_thetas, rle_theta_count, b, irl::mix64(g.seed, 3));
            irl::Environment env(b.mdp, b.expert, irl::feedback_option_from_int(rle_flags.option));
            irl::RleConfig rc;
            rc.per_stage_episodes = rle_N;
            rc.main_episodes = rle_K;
            rc.delta = rle_flags.delta;
            rc.eps = rle_flags.eps;
            rc.C = rle_flags.C;
            rc.c_xi = rle_cxi;
            rc.paper_faithful = g.paper_faithful;
            const auto result = irl::rle_run(env, irl::ParamSet::finite(thetas), rc, g.seed);
            const auto truth = irl::ground_truth_mapping(b.mdp, b.expert);
            const Json estimates = {
                {"D_all_Theta_surrogate",
                 irl::metric_to_json(
                     irl::D_all_Theta(b.mdp, truth, result.mapping, thetas, irl::DAllMode::surrogate))},
                {"D_pi_Theta_expert",
                 irl::metric_to_json(irl::D_pi_Theta(b.mdp, b.expert, truth, result.mapping, thetas))},
                {"monotone", irl::is_monotone(truth, result.mapping, thetas)}};
            emit(g, dump(irl::rle_summary_to_json(result.summary, estimates)));
            return 0;
        }

        if (*metric) {
            const Bundle b = load_bundle(met_instance);
            auto load_reward = [&](const std::string& path) {
                if (path.empty()) throw irl::ValidationError("--r1 and --r2 are required for --kind " + met_kind);
                auto r = irl::reward_from_json(irl::read_json_file(path));
                irl::check_shapes(b.mdp, nullptr, &r);
                return r;
            };
            Json j;
            if (met_kind == "d_pi") {
                const auto pi = resolve_policy(met_policy, b, irl::mix64(g.seed, 2));
                j = irl::metric_to_json(irl::d_pi(b.mdp, pi, load_reward(met_r1), load_reward(met_r2)));
            } else if (met_kind == "all_bruteforce") {
                j = irl::metric_to_json(irl::d_all_bruteforce(b.mdp, load_reward(met_r1), load_reward(met_r2)));
            } else if (met_kind == "all_surrogate") {
                j = irl::metric_to_json(irl::d_all_surrogate(b.mdp, load_reward(met_r1), load_reward(met_r2)));
            } else if (met_kind == "concentrability") {
                const auto eval = resolve_policy(met_policy, b, irl::mix64(g.seed, 2));
                const auto beh = resolve_policy(met_policy2, b, irl::mix64(g.seed, 2));
                const prec_t v = irl::concentrability(b.mdp, eval, beh);
                j = {{"value", std::isfinite(v) ? Json(v) : Json("inf")},
                     {"sum", irl::concentrability_sum(b.mdp, eval, beh)},
                     {"kind", "exact"}};
            } else if (met_kind == "weak_transferability" || met_kind == "transferability") {
                if (met_target.empty()) throw irl::ValidationError("--target is required for " + met_kind);
                const Bundle t = load_bundle(met_target);
                const auto pi_tgt = resolve_policy(met_policy2, t, irl::mix64(g.seed, 2));
                prec_t v;
                if (met_kind == "weak_transferability")
                    v = irl::weak_transferability(b.mdp, t.mdp, resolve_policy(met_policy, b, irl::mix64(g.seed, 2)),
                                                  pi_tgt);
                else
                    v = irl::transferability_bruteforce(b.mdp, t.mdp, pi_tgt);
                j = {{"value", std::isfinite(v) ? Json(v) : Json("inf")},
                     {"kind", met_kind == "transferability" ? "bruteforce" : "exact"}};
            } else {
                throw irl::ValidationError("unknown metric kind '" + met_kind + "'");
            }
            emit(g, dump(j));
            return 0;
        }

        if (*experiment) {
            if (g.config.empty()) throw irl::ValidationError("experiment requires --config");
            Json cfg = load_config(g);
            if (!cfg.contains("seed")) cfg["seed"] = g.seed;
            if (g.paper_faithful) cfg["paper_faithful"] = true;
            auto config = irl::ExperimentConfig::from_json(cfg);
            if (exp_workers_opt->count() > 0) config.workers = exp_workers;
            if (!g.out.empty()) config.out = g.out;
            const auto result = irl::run_experiment(config);
            const Json summary = irl::experiment_summary(config, result);
            if (config.out.empty()) {
                std::cout << irl::to_csv(result.rows);
                std::cerr << summary.dump(2) << "\n";
            } else {
                irl::write_text_file(config.out, irl::to_csv(result.rows));
                irl::write_text_file(config.out + ".summary.json", dump(summary));
            }
            if (config.acceptance && !irl::evaluate_acceptance(*config.acceptance, result.rows).passed) {
                std::cerr << "acceptance check failed\n";
                return kExitAcceptance;
            }
            return 0;
        }

        if (*hard) {
            if (hard_S < 2 || hard_S % 2 != 0) throw irl::ValidationError("hard: S must be even");
            std::vector<irl::SignVector> slices;
            if (hard_S >= 8) {
                slices = irl::packing_set(hard_S, 16, irl::mix64(g.seed, 1)).members;
            } else {
                irl::Rng rng(irl::mix64(g.seed, 1));
                irl::SignVector base(static_cast<std::size_t>(hard_S), 1);
                std::fill(base.begin() + hard_S / 2, base.end(), -1);
                for (int i = 0; i < 16; ++i) {
                    std::shuffle(base.begin(), base.end(), rng.engine());
                    slices.push_back(base);
                }
            }
            const auto spec = irl::make_hard_spec(hard_H, hard_S, hard_A, hard_eps, hard_cstar, hard_istar, slices,
                                                  irl::mix64(g.seed, 2));
            Json j;
            if (hard_offline) {
                const auto inst = irl::hard_offline(spec);
                j = {{"mdp", irl::mdp_to_json(inst.mdp)},
                     {"expert", irl::policy_to_json(inst.expert)},
                     {"behavior", irl::policy_to_json(inst.behavior)},
                     {"evaluation", irl::policy_to_json(inst.evaluation)},
                     {"concentrability_sum", irl::concentrability_sum(inst.mdp, inst.evaluation, inst.behavior)}};
            } else {
                const auto inst = irl::hard_online(spec);
                j = {{"mdp", irl::mdp_to_json(inst.mdp)}, {"expert", irl::policy_to_json(inst.expert)}};
            }
            emit(g, dump(j));
            return 0;
        }
    } catch (const irl::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
