#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "irl/instances.hpp"
#include "irl/io.hpp"

namespace irl {

enum class Scenario { offline, offline_expert_eval, online, transfer };

std::string to_string(Scenario scenario);
Scenario scenario_from_string(const std::string& name);

/// Distance reported per cell. d_pi uses the scenario's evaluation policy.
enum class MetricMode { d_pi, all_surrogate, all_bruteforce };

std::string to_string(MetricMode mode);
MetricMode metric_mode_from_string(const std::string& name);

/// Checks applied to a finished sweep; failures map to CLI exit code 3.
struct AcceptanceCheck {
    std::optional<prec_t> slope_min;
    std::optional<prec_t> slope_max;
    bool medians_nonincreasing = false;
    bool strict = false;
    std::optional<prec_t> min_monotone_fraction;
};

struct ExperimentConfig {
    Scenario scenario = Scenario::offline;
    std::uint64_t seed = 0;  ///< root seed, fans out per (K, seed)

    // Instance: files when mdp_path is set, otherwise random_mdp(H, S, A, instance_seed).
    std::string mdp_path;
    std::string expert_path;
    int horizon = 4;
    int states = 4;
    int actions = 3;
    std::uint64_t instance_seed = 0;
    prec_t concentration = 1.0;

    /// behavior: full_support | uniform | expert; evaluation: expert | uniform | behavior
    std::string behavior = "full_support";
    std::string evaluation = "expert";

    std::vector<std::uint64_t> k_schedule;
    std::vector<std::uint64_t> seeds;

    int theta_count = 10;
    prec_t theta_scale = 1.0;

    prec_t delta = 0.1;
    prec_t eps = 0.1;
    prec_t C = 1.0;
    int option = 1;
    std::optional<MetricMode> metric;  ///< default: d_pi offline/transfer, all_surrogate online

    std::uint64_t per_stage_episodes = 0;  ///< online N, 0 = default schedule
    prec_t c_xi = kDefaultXiConstant;
    bool paper_faithful = false;

    prec_t transfer_mix = 0.2;  ///< target kernel = (1 - mix) P + mix Q

    int workers = 0;  ///< 0 = hardware concurrency
    std::string out;
    std::optional<AcceptanceCheck> acceptance;

    static ExperimentConfig from_json(const Json& j);
    Json to_json() const;
    void validate() const;
    MetricMode effective_metric() const;
};

struct ResultRow {
    Scenario scenario = Scenario::offline;
    std::uint64_t K = 0;
    std::uint64_t seed = 0;
    prec_t metric = 0.0;
    bool monotone = false;
    std::uint64_t episodes = 0;
    double wall_ms = 0.0;
};

/// Everything a cell needs that does not depend on (K, seed).
struct ScenarioFixture {
    Mdp mdp;
    Policy expert;
    Policy behavior;
    Policy evaluation;
    std::optional<Mdp> target;
    std::vector<RewardParam> thetas;
};

ScenarioFixture build_fixture(const ExperimentConfig& config);

/// Seed of cell (K, seed): mix64(mix64(root, K), seed).
std::uint64_t cell_seed(std::uint64_t root, std::uint64_t K, std::uint64_t seed);

/// r-hat(theta) <= R*(theta) elementwise for every theta, up to 1e-12.
bool is_monotone(const RewardMapping& truth, const RewardMapping& estimate, const std::vector<RewardParam>& thetas);

ResultRow run_cell(const ExperimentConfig& config, const ScenarioFixture& fixture, std::uint64_t K,
                   std::uint64_t seed);

struct ExperimentResult {
    std::vector<ResultRow> rows;  ///< sorted by (K, seed) in schedule order
    std::string config_hash;
    std::string version;
};

/// Runs every (K, seed) cell, in parallel up to `workers`.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// scenario,K,seed,metric,monotone,episodes,wall_ms
std::string to_csv(const std::vector<ResultRow>& rows);

/// Median metric per K, in increasing K.
std::vector<std::pair<std::uint64_t, prec_t>> median_by_k(const std::vector<ResultRow>& rows);

/// Least-squares slope of log(median) against log K. Needs at least four K
/// values with positive medians; constant medians are rejected.
prec_t fit_rate(const std::vector<ResultRow>& rows);
prec_t fit_rate(const std::vector<std::pair<std::uint64_t, prec_t>>& medians);

bool medians_nonincreasing(const std::vector<std::pair<std::uint64_t, prec_t>>& medians, bool strict);

prec_t monotone_fraction(const std::vector<ResultRow>& rows);

struct AcceptanceOutcome {
    bool passed = true;
    std::vector<std::string> messages;
};

AcceptanceOutcome evaluate_acceptance(const AcceptanceCheck& check, const std::vector<ResultRow>& rows);

/// Sweep summary: hash, version, medians, slope (when defined), monotone fraction.
Json experiment_summary(const ExperimentConfig& config, const ExperimentResult& result);

/// FNV-1a 64 of the canonical config JSON, hex.
std::string config_hash(const ExperimentConfig& config);

/// git describe of the source tree at configure time.
std::string version_string();

} // namespace irl
