#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "irl/metrics.hpp"
#include "irl/offline_data.hpp"
#include "irl/reward_mapping.hpp"
#include "irl/rle.hpp"
#include "irl/rlp.hpp"

namespace irl {

using Json = nlohmann::json;

/// {"H","S","A","s_init","P":[h][s][a][s']}
Json mdp_to_json(const Mdp& mdp);
Mdp mdp_from_json(const Json& j);

/// {"B","r":[h][s][a]}
Json reward_to_json(const RewardTable& reward);
RewardTable reward_from_json(const Json& j);

/// {"pi":[h][s][a]}
Json policy_to_json(const Policy& policy);
Policy policy_from_json(const Json& j);

/// {"V":[h][s],"A":[h][s][a]}
Json param_to_json(const RewardParam& theta);
RewardParam param_from_json(const Json& j);

/// A list of params, or {"kind":"fullbox","H","S","A"}.
Json param_set_to_json(const ParamSet& set);
ParamSet param_set_from_json(const Json& j);

/// {"value","kind","witness":{"step","policy","theta_index"} | null}
Json metric_to_json(const MetricReport& report);

Json rlp_model_to_json(const RlpModel& model);

Json rle_summary_to_json(const RleSummary& summary, const Json& metric_estimates);

/// One episode per line: {"k":int,"steps":[[h,s,a,e],...]}.
void write_dataset_jsonl(std::ostream& out, const EpisodeDataset& dataset);
/// Shapes and option are not part of the line format and come from the caller.
EpisodeDataset read_dataset_jsonl(std::istream& in, FeedbackOption option, int horizon, int states, int actions);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

} // namespace irl
