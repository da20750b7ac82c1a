#pragma once

#include "construal/bounds.hpp"
#include "construal/demonstrator.hpp"
#include "construal/experiment.hpp"
#include "construal/inference.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace construal {

using json = nlohmann::json;

json trajectory_to_json(const Trajectory& traj);
Trajectory trajectory_from_json(const json& j);
Trajectory load_trajectory(const std::filesystem::path& path);
/// `t,state,action` rows with a header line.
std::string trajectory_to_csv(const Trajectory& traj);

json posterior_to_json(const Posterior& post, const HypothesisSpace& space);
json bound_report_to_json(const BoundReport& report);

json scenario_result_to_json(const ScenarioResult& r);
ScenarioResult scenario_result_from_json(const json& j);
/// Accepts either a bare array of results or an object with a "pooled" array.
std::vector<ScenarioResult> scenario_results_from_json(const json& j);

json comparison_to_json(const ComparisonReport& report);
/// Long-format plot data: scenario,series,question,value,se.
std::string bar_plot_csv(const std::vector<ScenarioResult>& results);

json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace construal
