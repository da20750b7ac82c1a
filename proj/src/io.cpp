#include "construal/io.hpp"

#include "construal/errors.hpp"

#include <fstream>
#include <sstream>

namespace construal {

json trajectory_to_json(const Trajectory& traj) {
    json steps = json::array();
    for (std::size_t t = 0; t < traj.steps.size(); ++t)
        steps.push_back({{"t", t}, {"state", traj.steps[t].state}, {"action", traj.steps[t].action}});
    json j = {{"grid_id", traj.grid_id},
              {"seed", traj.seed},
              {"truncated", traj.truncated},
              {"steps", std::move(steps)}};
    j["final_state"] = traj.final_state ? json(*traj.final_state) : json(nullptr);
    return j;
}

Trajectory trajectory_from_json(const json& j) {
    Trajectory traj;
    try {
        traj.grid_id = j.value("grid_id", std::string{});
        traj.seed = j.value("seed", std::uint64_t{0});
        traj.truncated = j.value("truncated", false);
        if (j.contains("final_state") && !j.at("final_state").is_null())
            traj.final_state = j.at("final_state").get<int>();
        const json& steps = j.is_array() ? j : j.at("steps");
        for (std::size_t i = 0; i < steps.size(); ++i) {
            const json& s = steps[i];
            if (s.contains("t") && s.at("t").get<std::size_t>() != i)
                throw ValidationError("trajectory steps are not in time order");
            traj.steps.push_back({s.at("state").get<int>(), s.at("action").get<int>()});
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed trajectory JSON: ") + e.what());
    }
    return traj;
}

Trajectory load_trajectory(const std::filesystem::path& path) {
    return trajectory_from_json(read_json_file(path));
}

std::string trajectory_to_csv(const Trajectory& traj) {
    std::string out = "t,state,action\n";
    for (std::size_t t = 0; t < traj.steps.size(); ++t)
        out += std::to_string(t) + "," + std::to_string(traj.steps[t].state) + "," +
               std::to_string(traj.steps[t].action) + "\n";
    return out;
}

json posterior_to_json(const Posterior& post, const HypothesisSpace& space) {
    const Matrix p = post.probabilities();
    json table = json::array();
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        for (Eigen::Index j = 0; j < p.cols(); ++j) {
            json row = {{"reward", space.rewards()[i].name()}, {"probability", p(i, j)}};
            if (post.kind == PosteriorKind::Joint)
                row["construal"] = space.construals()[j].name();
            table.push_back(std::move(row));
        }
    }
    return {{"model", post.kind == PosteriorKind::Joint ? "joint" : "reward-only"},
            {"log_marginal_likelihood", post.log_normalizer},
            {"table", std::move(table)}};
}

json bound_report_to_json(const BoundReport& r) {
    return {{"r_max", r.r_max},
            {"gamma", r.gamma},
            {"l1_gap", r.l1_gap},
            {"bound_value", r.bound_value},
            {"empirical_gap", r.empirical_gap},
            {"satisfied", r.satisfied}};
}

json scenario_result_to_json(const ScenarioResult& r) {
    json j = {{"grid_id", r.grid_id},
              {"scenario", r.scenario.label()},
              {"reward_only_judgment", r.reward_only_judgment},
              {"joint_reward_judgment", r.joint_reward_judgment},
              {"joint_construal_judgment", r.joint_construal_judgment}};
    j["human_mean"] = r.human_mean ? json(*r.human_mean) : json(nullptr);
    j["human_se"] = r.human_se ? json(*r.human_se) : json(nullptr);
    return j;
}

ScenarioResult scenario_result_from_json(const json& j) {
    ScenarioResult r;
    try {
        r.grid_id = j.value("grid_id", std::string{"pooled"});
        r.scenario = Scenario::from_label(j.at("scenario").get<std::string>());
        r.reward_only_judgment = j.at("reward_only_judgment").get<double>();
        r.joint_reward_judgment = j.at("joint_reward_judgment").get<double>();
        r.joint_construal_judgment = j.at("joint_construal_judgment").get<double>();
        if (j.contains("human_mean") && !j.at("human_mean").is_null())
            r.human_mean = j.at("human_mean").get<double>();
        if (j.contains("human_se") && !j.at("human_se").is_null())
            r.human_se = j.at("human_se").get<double>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed scenario result: ") + e.what());
    }
    for (double v : {r.reward_only_judgment, r.joint_reward_judgment, r.joint_construal_judgment})
        if (!(v >= -1.0 && v <= 1.0))
            throw ValidationError("judgment outside [-1, 1]");
    return r;
}

std::vector<ScenarioResult> scenario_results_from_json(const json& j) {
    const json& rows = j.is_array() ? j : j.at("pooled");
    std::vector<ScenarioResult> out;
    for (const json& row : rows)
        out.push_back(scenario_result_from_json(row));
    return out;
}

json comparison_to_json(const ComparisonReport& rep) {
    json rows = json::array();
    for (const ScenarioResult& r : rep.rows)
        rows.push_back(scenario_result_to_json(r));
    auto corr = [](const ModelCorrelation& m) {
        return json{{"model", m.model}, {"pearson_r", m.correlation.r}, {"p_value", m.correlation.p_value}};
    };
    return {{"question", "reward"},
            {"n", rep.rows.size()},
            {"correlations", json::array({corr(rep.reward_only), corr(rep.joint)})},
            {"rows", std::move(rows)}};
}

std::string bar_plot_csv(const std::vector<ScenarioResult>& results) {
    std::ostringstream out;
    out.precision(17);
    out << "scenario,series,question,value,se\n";
    for (const ScenarioResult& r : results) {
        const std::string s = r.scenario.label();
        if (r.human_mean)
            out << s << ",human,reward," << *r.human_mean << "," << r.human_se.value_or(0.0) << "\n";
        out << s << ",joint,reward," << r.joint_reward_judgment << ",\n";
        out << s << ",joint,construal," << r.joint_construal_judgment << ",\n";
        out << s << ",reward_only,reward," << r.reward_only_judgment << ",\n";
    }
    return out.str();
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open JSON file: " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write file: " + path.string());
    out << text;
}

} // namespace construal
