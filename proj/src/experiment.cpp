#include "construal/experiment.hpp"

#include "construal/errors.hpp"
#include "construal/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace construal {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ','))
        out.push_back(trim(field));
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

double parse_double(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v))
        throw std::runtime_error("invalid number for " + what + ": '" + s + "'");
    return v;
}

long parse_long(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size())
        throw std::runtime_error("invalid integer for " + what + ": '" + s + "'");
    return v;
}

std::uint64_t demo_seed(std::uint64_t base, std::size_t grid_index, std::size_t scenario_index) {
    return base + 1000 * grid_index + scenario_index;
}

ScenarioResult summarize(const std::string& grid_id, const ScenarioInference& inf,
                         const HypothesisSpace& space) {
    ScenarioResult r;
    r.grid_id = grid_id;
    r.scenario = inf.scenario;
    r.reward_only_judgment =
        to_judgment_scale(preference_probability(inf.reward_only, space, Goal::Pink));
    r.joint_reward_judgment = to_judgment_scale(preference_probability(inf.joint, space, Goal::Pink));
    r.joint_construal_judgment =
        to_judgment_scale(notch_awareness_probability(inf.joint, space, true));
    return r;
}

std::pair<Eigen::Index, Eigen::Index> argmax(const Matrix& m) {
    Eigen::Index bi = 0, bj = 0;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (m(i, j) > m(bi, bj)) {
                bi = i;
                bj = j;
            }
    return {bi, bj};
}

} // namespace

std::string Scenario::label() const {
    return std::string(notch_aware ? "aware_" : "unaware_") + goal_name(preferred);
}

Scenario Scenario::from_label(const std::string& label) {
    for (const Scenario& s : all_scenarios())
        if (s.label() == label)
            return s;
    throw ValidationError("unknown scenario label '" + label + "'");
}

const std::array<Scenario, 4>& all_scenarios() {
    static const std::array<Scenario, 4> scenarios{{
        {true, Goal::Pink},
        {false, Goal::Pink},
        {true, Goal::Yellow},
        {false, Goal::Yellow},
    }};
    return scenarios;
}

const char* question_name(Question q) { return q == Question::Reward ? "reward" : "construal"; }

Question question_from_name(const std::string& name) {
    if (name == "reward")
        return Question::Reward;
    if (name == "construal")
        return Question::Construal;
    throw ValidationError("unknown question '" + name + "'");
}

// ---------------------------------------------------------------------------

const HumanRecord* HumanSummary::find(const std::string& scenario, Question q) const {
    for (const HumanRecord& r : records)
        if (r.scenario == scenario && r.question == q)
            return &r;
    return nullptr;
}

HumanRecord make_human_record(std::string scenario, Question q, int n, double proportion_positive) {
    Scenario::from_label(scenario);
    if (n <= 0)
        throw ValidationError("respondent count must be positive");
    if (!(proportion_positive >= 0.0 && proportion_positive <= 1.0))
        throw ValidationError("proportion must lie in [0, 1]");
    HumanRecord r;
    r.scenario = std::move(scenario);
    r.question = q;
    r.n_respondents = n;
    r.proportion_positive = proportion_positive;
    r.mean_score = 2.0 * proportion_positive - 1.0;
    r.standard_error = 2.0 * std::sqrt(proportion_positive * (1.0 - proportion_positive) / n);
    return r;
}

HumanSummary parse_human_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int row = 0;
    std::vector<std::string> header;
    while (header.empty() && std::getline(in, line)) {
        ++row;
        if (!trim(line).empty())
            header = split_csv(trim(line));
    }
    const bool summary = header == std::vector<std::string>{"scenario", "question", "n",
                                                            "proportion_positive"};
    const bool participants = header == std::vector<std::string>{"participant", "scenario",
                                                                 "question", "response"};
    if (!summary && !participants)
        throw std::runtime_error("row " + std::to_string(row) +
                                 ": unrecognized header (expected scenario,question,n,"
                                 "proportion_positive or participant,scenario,question,response)");

    HumanSummary out;
    // participant mode: (scenario, question) -> (count, positives)
    std::vector<std::pair<std::pair<std::string, Question>, std::pair<int, int>>> tallies;
    std::set<std::pair<std::string, int>> seen;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty())
            continue;
        const auto fields = split_csv(trim(line));
        try {
            if (fields.size() != 4)
                throw std::runtime_error("expected 4 fields, found " + std::to_string(fields.size()));
            if (summary) {
                const Question q = question_from_name(fields[1]);
                if (!seen.insert({fields[0], static_cast<int>(q)}).second)
                    throw std::runtime_error("duplicate record for " + fields[0] + "/" + fields[1]);
                const long n = parse_long(fields[2], "n");
                out.records.push_back(make_human_record(fields[0], q, static_cast<int>(n),
                                                        parse_double(fields[3], "proportion")));
            } else {
                Scenario::from_label(fields[1]);
                const Question q = question_from_name(fields[2]);
                bool positive = false;
                if (fields[3] == "1" || fields[3] == "true" || fields[3] == "True")
                    positive = true;
                else if (fields[3] != "-1" && fields[3] != "false" && fields[3] != "False")
                    throw std::runtime_error("response must be 1/-1 or true/false");
                auto key = std::make_pair(fields[1], q);
                auto it = std::find_if(tallies.begin(), tallies.end(),
                                       [&](const auto& t) { return t.first == key; });
                if (it == tallies.end()) {
                    tallies.push_back({key, {0, 0}});
                    it = std::prev(tallies.end());
                }
                it->second.first += 1;
                it->second.second += positive ? 1 : 0;
            }
        } catch (const std::exception& e) {
            throw std::runtime_error("row " + std::to_string(row) + ": " + e.what());
        }
    }
    for (const auto& [key, counts] : tallies)
        out.records.push_back(make_human_record(key.first, key.second, counts.first,
                                                static_cast<double>(counts.second) / counts.first));
    if (out.records.empty())
        throw std::runtime_error("human data contains no records");
    return out;
}

HumanSummary ingest_human_summary(const std::filesystem::path& csv) {
    std::ifstream in(csv);
    if (!in)
        throw std::runtime_error("cannot open human data file: " + csv.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_human_csv(buf.str());
    } catch (const std::exception& e) {
        throw std::runtime_error(csv.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_absolute() ? path : base_dir / path;
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "grid") {
                GridEntry entry;
                const auto colon = value.find(':');
                if (colon != std::string::npos && colon > 0 && value.find('/') > colon) {
                    entry.id = trim(value.substr(0, colon));
                    entry.path = resolve(trim(value.substr(colon + 1)));
                } else {
                    entry.path = resolve(value);
                    entry.id = std::filesystem::path(value).stem().string();
                }
                cfg.grids.push_back(std::move(entry));
            } else if (key == "beta") {
                cfg.beta = parse_double(value, key);
            } else if (key == "demo_beta") {
                cfg.demo_beta = parse_double(value, key);
            } else if (key == "gamma") {
                cfg.gamma = parse_double(value, key);
            } else if (key == "tol") {
                cfg.tol = parse_double(value, key);
            } else if (key == "max_iters") {
                cfg.max_iters = parse_long(value, key);
            } else if (key == "max_steps") {
                cfg.max_steps = static_cast<int>(parse_long(value, key));
            } else if (key == "preferred_reward") {
                cfg.preferred_reward = parse_double(value, key);
            } else if (key == "other_reward") {
                cfg.other_reward = parse_double(value, key);
            } else if (key == "step_reward") {
                cfg.step_reward = parse_double(value, key);
            } else if (key == "seed") {
                cfg.seed = static_cast<std::uint64_t>(parse_long(value, key));
            } else if (key == "demonstrator") {
                if (value == "soft")
                    cfg.demonstrator = DemonstratorKind::Soft;
                else if (value == "greedy")
                    cfg.demonstrator = DemonstratorKind::Greedy;
                else
                    throw std::runtime_error("demonstrator must be 'soft' or 'greedy'");
            } else if (key == "human") {
                cfg.human_data = resolve(value);
            } else {
                throw std::runtime_error("unknown key '" + key + "'");
            }
        } catch (const std::exception& e) {
            throw std::runtime_error("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (cfg.grids.empty())
        throw std::runtime_error("config names no grid fixtures");
    std::set<std::string> ids;
    for (const auto& g : cfg.grids)
        if (!ids.insert(g.id).second)
            throw std::runtime_error("duplicate grid id '" + g.id + "'");
    if (!(cfg.beta > 0.0) || !(cfg.demo_beta > 0.0))
        throw std::runtime_error("beta and demo_beta must be positive");
    if (!(cfg.gamma >= 0.0 && cfg.gamma < 1.0))
        throw std::runtime_error("gamma must lie in [0, 1)");
    if (cfg.max_steps <= 0 || cfg.max_iters <= 0 || !(cfg.tol > 0.0))
        throw std::runtime_error("max_steps, max_iters and tol must be positive");
    cfg.hypotheses(); // validates the reward magnitudes
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config(buf.str(), path.parent_path());
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------

void check_preference_dominance(const GridSpec& grid, const std::string& grid_id,
                                const ExperimentConfig& cfg) {
    const HypothesisSpace space = cfg.hypotheses();
    for (const Construal& construal : space.construals()) {
        for (const RewardHypothesis& reward : space.rewards()) {
            const Goal want = reward.preferred();
            if (!path_length(grid, construal, grid.start(), grid.goal(want)))
                continue;
            const TabularMDP mdp = compile_mdp(grid, construal, reward, cfg.gamma);
            const Trajectory t =
                rollout(mdp, greedy_policy(value_iteration(mdp, cfg.solver())), 0, cfg.max_steps);
            const auto got = reached_goal(grid, t);
            if (got != want)
                throw std::runtime_error(
                    "grid '" + grid_id + "': goal reward gap does not dominate path length (" +
                    reward.name() + ", " + construal.name() + " reaches " +
                    (got ? goal_name(*got) : "no goal") + ")");
        }
    }
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    ExperimentResult out{cfg, cfg.hypotheses(), cfg.grids, {}, {}, {}, {}, {}, {}, {}};
    for (const GridEntry& entry : cfg.grids) {
        if (!std::filesystem::exists(entry.path))
            throw std::runtime_error("grid fixture not found: " + entry.path.string());
        out.grids.push_back(load_grid(entry.path));
        check_preference_dominance(out.grids.back(), entry.id, cfg);
    }

    const PlanningOptions planning = cfg.planning();
    PolicyCache cache;
    const auto& scenarios = all_scenarios();
    for (std::size_t si = 0; si < scenarios.size(); ++si) {
        const Scenario& sc = scenarios[si];
        const RewardHypothesis reward = RewardHypothesis::preferring(
            sc.preferred, cfg.preferred_reward, cfg.other_reward, cfg.step_reward);
        std::vector<Demonstration> pooled;
        for (std::size_t gi = 0; gi < out.grids.size(); ++gi) {
            const GridSpec& grid = out.grids[gi];
            const TabularMDP true_mdp = compile_mdp(grid, Construal::full(), reward, cfg.gamma);
            const TabularMDP construed = compile_mdp(grid, sc.construal(), reward, cfg.gamma);
            const std::uint64_t seed = demo_seed(cfg.seed, gi, si);
            Trajectory traj =
                cfg.demonstrator == DemonstratorKind::Soft
                    ? simulate(true_mdp, construed, cfg.demo_beta, seed, cfg.max_steps, cfg.solver())
                    : simulate_greedy(true_mdp, construed, seed, cfg.max_steps, cfg.solver());
            traj.grid_id = cfg.grids[gi].id;
            out.demonstrations.push_back({traj.grid_id, sc, traj, reached_goal(grid, traj)});

            const Demonstration single{grid, traj};
            out.per_trajectory.push_back(
                {sc, reward_only_posterior(std::span(&single, 1), out.space, planning, &cache),
                 joint_posterior(std::span(&single, 1), out.space, planning, &cache)});
            pooled.push_back(single);
        }
        out.pooled.push_back({sc, reward_only_posterior(pooled, out.space, planning, &cache),
                              joint_posterior(pooled, out.space, planning, &cache)});
        out.results.push_back(summarize("pooled", out.pooled.back(), out.space));
    }

    if (cfg.human_data) {
        const HumanSummary human = ingest_human_summary(*cfg.human_data);
        for (ScenarioResult& r : out.results)
            if (const HumanRecord* rec = human.find(r.scenario.label(), Question::Reward)) {
                r.human_mean = rec->mean_score;
                r.human_se = rec->standard_error;
            }
    }

    for (std::size_t gi = 0; gi < out.grids.size(); ++gi) {
        const GridSpec& grid = out.grids[gi];
        for (Goal g : {Goal::Pink, Goal::Yellow}) {
            const RewardHypothesis reward =
                RewardHypothesis::preferring(g, cfg.preferred_reward, cfg.other_reward, cfg.step_reward);
            const TabularMDP true_mdp = compile_mdp(grid, Construal::full(), reward, cfg.gamma);
            const TabularMDP construed =
                compile_mdp(grid, Construal::notch_unaware(), reward, cfg.gamma);
            out.grid_bounds.push_back(
                {cfg.grids[gi].id, g, verify_bound(true_mdp, construed, cfg.beta, cfg.solver())});
        }
    }

    // Learners act on each model's MAP hypothesis; both are scored on the true task.
    for (const ScenarioInference& inf : out.pooled) {
        const auto [ci, cj] = argmax(inf.joint.log_weights);
        const auto [ri, rj] = argmax(inf.reward_only.log_weights);
        (void)rj;
        const RewardHypothesis truth = RewardHypothesis::preferring(
            inf.scenario.preferred, cfg.preferred_reward, cfg.other_reward, cfg.step_reward);
        const Construal& map_construal = out.space.construals()[cj];
        for (std::size_t gi = 0; gi < out.grids.size(); ++gi) {
            const GridSpec& grid = out.grids[gi];
            const TabularMDP true_mdp = compile_mdp(grid, Construal::full(), truth, cfg.gamma);
            const TabularMDP construed = compile_mdp(grid, map_construal, truth, cfg.gamma);
            const Policy& con_policy = cache.get(grid, map_construal, out.space.rewards()[ci], planning);
            const Policy& rl_policy =
                cache.get(grid, Construal::full(), out.space.rewards()[ri], planning);
            out.learner_gaps.push_back(
                {cfg.grids[gi].id, inf.scenario,
                 make_report(reward_magnitude(true_mdp), cfg.gamma,
                             dynamics_l1_gap(true_mdp.dynamics(), construed.dynamics()),
                             empirical_gap(true_mdp, con_policy, rl_policy))});
        }
    }
    return out;
}

ComparisonReport compare_models(const std::vector<ScenarioResult>& results,
                                const HumanSummary& human) {
    std::vector<std::string> missing;
    for (const Scenario& sc : all_scenarios()) {
        const bool have_model = std::any_of(results.begin(), results.end(),
                                            [&](const ScenarioResult& r) { return r.scenario == sc; });
        if (!have_model)
            missing.push_back(sc.label() + " (model)");
        if (!human.find(sc.label(), Question::Reward))
            missing.push_back(sc.label() + " (human)");
    }
    if (!missing.empty()) {
        std::string msg = "scenario keys missing:";
        for (const auto& m : missing)
            msg += " " + m;
        throw std::runtime_error(msg);
    }

    ComparisonReport rep;
    std::vector<double> human_means, ro, joint;
    for (const Scenario& sc : all_scenarios()) {
        ScenarioResult row = *std::find_if(results.begin(), results.end(),
                                           [&](const ScenarioResult& r) { return r.scenario == sc; });
        const HumanRecord* rec = human.find(sc.label(), Question::Reward);
        row.human_mean = rec->mean_score;
        row.human_se = rec->standard_error;
        human_means.push_back(rec->mean_score);
        ro.push_back(row.reward_only_judgment);
        joint.push_back(row.joint_reward_judgment);
        rep.rows.push_back(row);
    }
    rep.reward_only = {"reward_only", pearson_correlation(ro, human_means)};
    rep.joint = {"joint", pearson_correlation(joint, human_means)};
    return rep;
}

void write_outputs(const ExperimentResult& result, const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir / "trajectories");

    for (const DemonstrationRecord& d : result.demonstrations) {
        const std::string stem = d.grid_id + "__" + d.scenario.label();
        json tj = trajectory_to_json(d.trajectory);
        tj["scenario"] = d.scenario.label();
        tj["reached_goal"] = d.reached ? json(goal_name(*d.reached)) : json(nullptr);
        write_text_file(out_dir / "trajectories" / (stem + ".json"), tj.dump(2) + "\n");
        write_text_file(out_dir / "trajectories" / (stem + ".csv"), trajectory_to_csv(d.trajectory));
    }

    json posts = json::object();
    json pooled = json::array();
    for (const ScenarioInference& inf : result.pooled)
        pooled.push_back({{"scenario", inf.scenario.label()},
                          {"reward_only", posterior_to_json(inf.reward_only, result.space)},
                          {"joint", posterior_to_json(inf.joint, result.space)}});
    json per = json::array();
    for (std::size_t i = 0; i < result.per_trajectory.size(); ++i) {
        const ScenarioInference& inf = result.per_trajectory[i];
        per.push_back({{"grid_id", result.demonstrations[i].grid_id},
                       {"scenario", inf.scenario.label()},
                       {"reward_only", posterior_to_json(inf.reward_only, result.space)},
                       {"joint", posterior_to_json(inf.joint, result.space)}});
    }
    posts["pooled"] = std::move(pooled);
    posts["per_trajectory"] = std::move(per);
    write_text_file(out_dir / "posteriors.json", posts.dump(2) + "\n");

    json results = json::object();
    json pooled_rows = json::array();
    for (const ScenarioResult& r : result.results)
        pooled_rows.push_back(scenario_result_to_json(r));
    json per_rows = json::array();
    for (std::size_t i = 0; i < result.per_trajectory.size(); ++i) {
        const ScenarioInference& inf = result.per_trajectory[i];
        ScenarioResult r;
        r.grid_id = result.demonstrations[i].grid_id;
        r.scenario = inf.scenario;
        r.reward_only_judgment =
            to_judgment_scale(preference_probability(inf.reward_only, result.space, Goal::Pink));
        r.joint_reward_judgment =
            to_judgment_scale(preference_probability(inf.joint, result.space, Goal::Pink));
        r.joint_construal_judgment =
            to_judgment_scale(notch_awareness_probability(inf.joint, result.space, true));
        per_rows.push_back(scenario_result_to_json(r));
    }
    const ExperimentConfig& cfg = result.config;
    results["parameters"] = {{"beta", cfg.beta},
                             {"demo_beta", cfg.demo_beta},
                             {"gamma", cfg.gamma},
                             {"preferred_reward", cfg.preferred_reward},
                             {"other_reward", cfg.other_reward},
                             {"step_reward", cfg.step_reward},
                             {"seed", cfg.seed},
                             {"demonstrator",
                              cfg.demonstrator == DemonstratorKind::Soft ? "soft" : "greedy"}};
    results["pooled"] = std::move(pooled_rows);
    results["per_grid"] = std::move(per_rows);
    write_text_file(out_dir / "scenario_results.json", results.dump(2) + "\n");
    write_text_file(out_dir / "bar_plot.csv", bar_plot_csv(result.results));

    json bounds = json::object();
    json gb = json::array();
    for (const GridBound& b : result.grid_bounds) {
        json j = bound_report_to_json(b.report);
        j["grid_id"] = b.grid_id;
        j["reward"] = std::string(goal_name(b.preferred)) + "_preferred";
        gb.push_back(std::move(j));
    }
    json lg = json::array();
    for (const LearnerGap& g : result.learner_gaps) {
        json j = bound_report_to_json(g.report);
        j["grid_id"] = g.grid_id;
        j["scenario"] = g.scenario.label();
        lg.push_back(std::move(j));
    }
    bounds["construal_pairs"] = std::move(gb);
    bounds["learner_gaps"] = std::move(lg);
    write_text_file(out_dir / "bounds.json", bounds.dump(2) + "\n");

    if (cfg.human_data) {
        const ComparisonReport rep = compare_models(result.results, ingest_human_summary(*cfg.human_data));
        write_text_file(out_dir / "comparison.json", comparison_to_json(rep).dump(2) + "\n");
    }
}

} // namespace construal
