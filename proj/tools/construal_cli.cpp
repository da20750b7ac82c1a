// Command-line front end: run the full experiment, run inference on saved
// trajectories, check the performance-gap bound, and correlate with human data.

#include "construal/bounds.hpp"
#include "construal/errors.hpp"
#include "construal/experiment.hpp"
#include "construal/inference.hpp"
#include "construal/io.hpp"

#include "CLI11.hpp"

#include <iostream>

using namespace construal;

namespace {

int fail(const std::string& kind, const std::string& message, int code = 1) {
    std::cerr << json{{"error", message}, {"kind", kind}}.dump() << "\n";
    return code;
}

void emit(const json& j, const std::string& out_path) {
    const std::string text = j.dump(2) + "\n";
    if (out_path.empty())
        std::cout << text;
    else
        write_text_file(out_path, text);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Joint reward and construal inference on blocks-and-notches mazes"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    auto* run = app.add_subcommand("run", "Simulate all scenarios, run both models, write reports");
    run->add_option("--config", config_path, "Experiment config file")->required();
    run->add_option("--out", out_dir, "Output directory")->required();

    std::string grid_path, model = "joint", out_file;
    std::vector<std::string> traj_paths;
    double beta = 0.1, gamma = 0.95, preferred = 1.0, other = 0.5, step = -0.01;
    auto* infer = app.add_subcommand("infer", "Posterior over rewards (and construals) for trajectories");
    infer->add_option("--grid", grid_path, "Grid file")->required();
    infer->add_option("--traj", traj_paths, "Trajectory JSON (repeatable)")->required();
    infer->add_option("--model", model, "reward-only or joint")
        ->check(CLI::IsMember({"reward-only", "joint"}));
    infer->add_option("--beta", beta, "Likelihood temperature");
    infer->add_option("--gamma", gamma, "Discount");
    infer->add_option("--preferred-reward", preferred);
    infer->add_option("--other-reward", other);
    infer->add_option("--step-reward", step);
    infer->add_option("--out", out_file, "Write JSON here instead of stdout");

    std::string bound_grid, construal_name = "unaware", reward_goal = "pink";
    auto* bound = app.add_subcommand("bound", "Empirical performance gap against the bound");
    bound->add_option("--grid", bound_grid, "Grid file")->required();
    bound->add_option("--construal", construal_name, "Construal of the planner")
        ->check(CLI::IsMember({"aware", "unaware"}));
    bound->add_option("--reward", reward_goal, "Preferred goal")->check(CLI::IsMember({"pink", "yellow"}));
    bound->add_option("--beta", beta);
    bound->add_option("--gamma", gamma);
    bound->add_option("--out", out_file);

    std::string human_path, results_path;
    auto* stats = app.add_subcommand("stats", "Correlate model judgments with human judgments");
    stats->add_option("--human", human_path, "Human summary or per-participant CSV")->required();
    stats->add_option("--results", results_path, "scenario_results.json from `run`")->required();
    stats->add_option("--out", out_file);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return app.exit(e);
        return fail("usage", e.what(), 2);
    }

    try {
        if (*run) {
            const ExperimentConfig cfg = load_config(config_path);
            write_outputs(run_experiment(cfg), out_dir);
        } else if (*infer) {
            const GridSpec grid = load_grid(grid_path);
            std::vector<Trajectory> trajs;
            for (const auto& p : traj_paths)
                trajs.push_back(load_trajectory(p));
            const HypothesisSpace space = HypothesisSpace::experiment(preferred, other, step);
            const PlanningOptions opts{beta, gamma, {}};
            const Posterior post = model == "joint" ? joint_posterior(trajs, space, grid, opts)
                                                    : reward_only_posterior(trajs, space, grid, opts);
            json j = posterior_to_json(post, space);
            j["pink_preferred_judgment"] =
                to_judgment_scale(preference_probability(post, space, Goal::Pink));
            if (post.kind == PosteriorKind::Joint)
                j["notch_aware_judgment"] =
                    to_judgment_scale(notch_awareness_probability(post, space, true));
            emit(j, out_file);
        } else if (*bound) {
            const GridSpec grid = load_grid(bound_grid);
            const RewardHypothesis reward = RewardHypothesis::preferring(
                reward_goal == "pink" ? Goal::Pink : Goal::Yellow, preferred, other, step);
            const Construal planner =
                construal_name == "aware" ? Construal::full() : Construal::notch_unaware();
            const TabularMDP true_mdp = compile_mdp(grid, Construal::full(), reward, gamma);
            const TabularMDP construed = compile_mdp(grid, planner, reward, gamma);
            json j = bound_report_to_json(verify_bound(true_mdp, construed, beta));
            j["construal"] = planner.name();
            j["reward"] = reward.name();
            emit(j, out_file);
        } else if (*stats) {
            const HumanSummary human = ingest_human_summary(human_path);
            const auto results = scenario_results_from_json(read_json_file(results_path));
            emit(comparison_to_json(compare_models(results, human)), out_file);
        }
    } catch (const ParseError& e) {
        return fail("parse", e.what());
    } catch (const ValidationError& e) {
        return fail("validation", e.what());
    } catch (const ConvergenceError& e) {
        return fail("convergence", e.what());
    } catch (const std::exception& e) {
        return fail("runtime", e.what());
    }
    return 0;
}
