#include "irl/io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace irl {

namespace {

int get_int(const Json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number_integer())
        throw ValidationError(std::string("json: missing integer field '") + key + "'");
    return j.at(key).get<int>();
}

void expect_array(const Json& j, std::size_t size, const std::string& what) {
    if (!j.is_array() || j.size() != size)
        throw ValidationError("json: " + what + " must be an array of length " + std::to_string(size));
}

Json table3_to_json(const Table3<prec_t>& t) {
    Json out = Json::array();
    for (int h = 0; h < t.horizon(); ++h) {
        Json step = Json::array();
        for (int s = 0; s < t.states(); ++s) {
            auto row = t.row(h, s);
            step.push_back(std::vector<prec_t>(row.begin(), row.end()));
        }
        out.push_back(std::move(step));
    }
    return out;
}

Table3<prec_t> table3_from_json(const Json& j, const std::string& what) {
    if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty() || !j[0][0].is_array())
        throw ValidationError("json: " + what + " must be a nonempty [h][s][a] array");
    const int H = static_cast<int>(j.size()), S = static_cast<int>(j[0].size()), A = static_cast<int>(j[0][0].size());
    Table3<prec_t> out(H, S, A);
    for (int h = 0; h < H; ++h) {
        expect_array(j[h], S, what + "[h]");
        for (int s = 0; s < S; ++s) {
            expect_array(j[h][s], A, what + "[h][s]");
            for (int a = 0; a < A; ++a) out(h, s, a) = j[h][s][a].get<prec_t>();
        }
    }
    return out;
}

} // namespace

Json mdp_to_json(const Mdp& mdp) {
    Json P = Json::array();
    for (int h = 0; h < mdp.horizon(); ++h) {
        Json step = Json::array();
        for (int s = 0; s < mdp.states(); ++s) {
            Json state = Json::array();
            for (int a = 0; a < mdp.actions(); ++a) {
                auto row = mdp.row(h, s, a);
                state.push_back(std::vector<prec_t>(row.begin(), row.end()));
            }
            step.push_back(std::move(state));
        }
        P.push_back(std::move(step));
    }
    return {{"H", mdp.horizon()}, {"S", mdp.states()}, {"A", mdp.actions()}, {"s_init", mdp.initial_state()},
            {"P", std::move(P)}};
}

Mdp mdp_from_json(const Json& j) {
    const int H = get_int(j, "H"), S = get_int(j, "S"), A = get_int(j, "A");
    if (H <= 0 || S <= 0 || A <= 0) throw ValidationError("json: MDP sizes must be positive");
    Mdp mdp(H, S, A, get_int(j, "s_init"));
    const Json& P = j.at("P");
    expect_array(P, H, "P");
    for (int h = 0; h < H; ++h) {
        expect_array(P[h], S, "P[h]");
        for (int s = 0; s < S; ++s) {
            expect_array(P[h][s], A, "P[h][s]");
            for (int a = 0; a < A; ++a) {
                expect_array(P[h][s][a], S, "P[h][s][a]");
                for (int n = 0; n < S; ++n) mdp.transition(h, s, a, n) = P[h][s][a][n].get<prec_t>();
            }
        }
    }
    validate_mdp(mdp);
    return mdp;
}

Json reward_to_json(const RewardTable& reward) { return {{"B", reward.declared_bound}, {"r", table3_to_json(reward.r)}}; }

RewardTable reward_from_json(const Json& j) {
    RewardTable out{table3_from_json(j.at("r"), "r"), j.value("B", 0.0)};
    if (out.declared_bound == 0.0) out.declared_bound = out.sup_norm();
    return out;
}

Json policy_to_json(const Policy& policy) { return {{"pi", table3_to_json(policy.table())}}; }

Policy policy_from_json(const Json& j) {
    Policy out(table3_from_json(j.is_object() ? j.at("pi") : j, "pi"));
    validate_policy(out);
    return out;
}

Json param_to_json(const RewardParam& theta) {
    Json V = Json::array();
    for (int h = 0; h < theta.values.rows(); ++h) {
        auto row = theta.values.row(h);
        V.push_back(std::vector<prec_t>(row.begin(), row.end()));
    }
    return {{"V", std::move(V)}, {"A", table3_to_json(theta.advantages)}};
}

RewardParam param_from_json(const Json& j) {
    RewardParam theta;
    theta.advantages = table3_from_json(j.at("A"), "A");
    const int H = theta.advantages.horizon(), S = theta.advantages.states();
    const Json& V = j.at("V");
    expect_array(V, H, "V");
    theta.values = Table2<prec_t>(H, S);
    for (int h = 0; h < H; ++h) {
        expect_array(V[h], S, "V[h]");
        for (int s = 0; s < S; ++s) theta.values(h, s) = V[h][s].get<prec_t>();
    }
    validate_param(theta);
    return theta;
}

Json param_set_to_json(const ParamSet& set) {
    if (set.kind == ParamSet::Kind::full_box)
        return {{"kind", "fullbox"}, {"H", set.horizon}, {"S", set.states}, {"A", set.actions}};
    Json out = Json::array();
    for (const auto& theta : set.members) out.push_back(param_to_json(theta));
    return out;
}

ParamSet param_set_from_json(const Json& j) {
    if (j.is_object()) {
        if (j.value("kind", std::string()) != "fullbox") throw ValidationError("json: unknown ParamSet kind");
        return ParamSet::full_box(get_int(j, "H"), get_int(j, "S"), get_int(j, "A"));
    }
    if (!j.is_array()) throw ValidationError("json: ParamSet must be a list or {\"kind\":\"fullbox\"}");
    std::vector<RewardParam> members;
    for (const auto& item : j) members.push_back(param_from_json(item));
    return ParamSet::finite(std::move(members));
}

Json metric_to_json(const MetricReport& report) {
    Json witness = nullptr;
    if (report.step || report.policy || report.theta_index) {
        witness = Json::object();
        if (report.step) witness["step"] = *report.step;
        if (report.policy) witness["policy"] = table3_to_json(report.policy->table());
        if (report.theta_index) witness["theta_index"] = *report.theta_index;
    }
    Json value = std::isfinite(report.value) ? Json(report.value) : Json("inf");
    return {{"value", value}, {"kind", to_string(report.kind)}, {"witness", witness}};
}

Json rlp_model_to_json(const RlpModel& model) {
    Json P = Json::array();
    for (int h = 0; h < model.horizon; ++h) {
        Json step = Json::array();
        for (int s = 0; s < model.states; ++s) {
            Json state = Json::array();
            for (int a = 0; a < model.actions; ++a) {
                auto row = model.p_hat.row(h, s, a);
                state.push_back(std::vector<prec_t>(row.begin(), row.end()));
            }
            step.push_back(std::move(state));
        }
        P.push_back(std::move(step));
    }
    Json support = Json::array(), visits = Json::array();
    for (int h = 0; h < model.horizon; ++h) {
        Json sup_h = Json::array(), vis_h = Json::array();
        for (int s = 0; s < model.states; ++s) {
            Json sup_s = Json::array(), vis_s = Json::array();
            for (int a = 0; a < model.actions; ++a) {
                sup_s.push_back(model.expert_support(h, s, a) != 0);
                vis_s.push_back(model.counts.n_sa(h, s, a));
            }
            sup_h.push_back(std::move(sup_s));
            vis_h.push_back(std::move(vis_s));
        }
        support.push_back(std::move(sup_h));
        visits.push_back(std::move(vis_h));
    }
    return {{"H", model.horizon},
            {"S", model.states},
            {"A", model.actions},
            {"P_hat", std::move(P)},
            {"expert_hat", table3_to_json(model.expert_hat)},
            {"expert_support", std::move(support)},
            {"N_b_sa", std::move(visits)},
            {"config",
             {{"delta", model.config.delta},
              {"eps", model.config.eps},
              {"C", model.config.C},
              {"option", to_int(model.config.option)},
              {"log_cover", model.config.log_cover}}}};
}

Json rle_summary_to_json(const RleSummary& summary, const Json& metric_estimates) {
    return {{"episodes_explore", summary.episodes_explore},
            {"episodes_main", summary.episodes_main},
            {"trim_retention_fraction", summary.trim_retention_fraction},
            {"metric_estimates", metric_estimates},
            {"per_stage_episodes", summary.per_stage_episodes},
            {"xi", summary.xi},
            {"exploration_converged", summary.exploration_converged}};
}

void write_dataset_jsonl(std::ostream& out, const EpisodeDataset& dataset) {
    for (const auto& ep : dataset.episodes) {
        Json steps = Json::array();
        for (const Step& st : ep.steps) steps.push_back({st.h, st.state, st.action, st.feedback});
        out << Json{{"k", ep.k}, {"steps", std::move(steps)}}.dump() << '\n';
    }
}

EpisodeDataset read_dataset_jsonl(std::istream& in, FeedbackOption option, int horizon, int states, int actions) {
    EpisodeDataset out;
    out.option = option;
    out.horizon = horizon;
    out.states = states;
    out.actions = actions;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        Json j;
        try {
            j = Json::parse(line);
        } catch (const Json::parse_error& e) {
            throw ValidationError("dataset line " + std::to_string(line_no) + ": " + e.what());
        }
        DatasetEpisode ep;
        ep.k = j.at("k").get<std::uint64_t>();
        for (const auto& st : j.at("steps")) {
            expect_array(st, 4, "step");
            ep.steps.push_back({st[0].get<int>(), st[1].get<int>(), st[2].get<int>(), st[3].get<int>()});
        }
        out.episodes.push_back(std::move(ep));
    }
    out.provenance.episodes = out.episodes.size();
    validate_dataset(out);
    return out;
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

} // namespace irl
