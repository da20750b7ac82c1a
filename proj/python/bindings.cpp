#include "construal/bounds.hpp"
#include "construal/errors.hpp"
#include "construal/experiment.hpp"
#include "construal/inference.hpp"
#include "construal/io.hpp"
#include "construal/stats.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace construal;

namespace {

py::dict report_dict(const BoundReport& r) {
    py::dict d;
    d["r_max"] = r.r_max;
    d["gamma"] = r.gamma;
    d["l1_gap"] = r.l1_gap;
    d["bound_value"] = r.bound_value;
    d["empirical_gap"] = r.empirical_gap;
    d["satisfied"] = r.satisfied;
    return d;
}

Trajectory make_trajectory(const std::vector<std::pair<int, int>>& pairs) {
    Trajectory t;
    for (auto [s, a] : pairs)
        t.steps.push_back({s, a});
    return t;
}

} // namespace

PYBIND11_MODULE(_construal, m) {
    m.doc() = "Joint reward and construal inference on blocks-and-notches mazes";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

    py::enum_<Goal>(m, "Goal").value("PINK", Goal::Pink).value("YELLOW", Goal::Yellow);

    // --- MDP core -----------------------------------------------------------
    py::class_<TabularMDP>(m, "TabularMDP")
        .def(py::init<Vector, std::vector<Matrix>, Matrix, double, std::vector<int>>(),
             py::arg("initial_dist"), py::arg("dynamics"), py::arg("reward"), py::arg("discount"),
             py::arg("terminal_states") = std::vector<int>{})
        .def_property_readonly("n_states", &TabularMDP::n_states)
        .def_property_readonly("n_actions", &TabularMDP::n_actions)
        .def_property_readonly("initial_dist", &TabularMDP::initial_dist)
        .def_property_readonly("dynamics", &TabularMDP::dynamics)
        .def_property_readonly("reward", &TabularMDP::reward)
        .def_property_readonly("discount", &TabularMDP::discount)
        .def_property_readonly("terminal_states", &TabularMDP::terminal_states);

    py::class_<Policy>(m, "Policy")
        .def(py::init<Matrix>())
        .def_static("uniform", &Policy::uniform)
        .def_property_readonly("probs", &Policy::probs);

    py::class_<ValueFunction>(m, "ValueFunction")
        .def_readonly("state_values", &ValueFunction::state_values)
        .def_readonly("action_values", &ValueFunction::action_values)
        .def_readonly("regularization", &ValueFunction::regularization)
        .def_readonly("iterations", &ValueFunction::iterations)
        .def_readonly("residual", &ValueFunction::residual);

    m.def("policy_evaluation", [](const TabularMDP& mdp, const Policy& pi) {
        return policy_evaluation(mdp, pi).state_values;
    });
    m.def("occupancy", [](const TabularMDP& mdp, const Policy& pi) { return occupancy(mdp, pi).visits; });
    m.def("value_iteration", [](const TabularMDP& mdp, double tol, long max_iters) {
        return value_iteration(mdp, {tol, max_iters});
    }, py::arg("mdp"), py::arg("tol") = 1e-8, py::arg("max_iters") = 100000);
    m.def("soft_value_iteration", [](const TabularMDP& mdp, double beta, double tol, long max_iters) {
        return soft_value_iteration(mdp, beta, {tol, max_iters});
    }, py::arg("mdp"), py::arg("beta"), py::arg("tol") = 1e-8, py::arg("max_iters") = 100000);
    m.def("soft_policy", &soft_policy, py::arg("values"), py::arg("mdp"), py::arg("beta"));
    m.def("greedy_policy", &greedy_policy);
    m.def("policy_return", &policy_return);

    // --- Grids ----------------------------------------------------------------
    py::class_<GridSpec>(m, "GridSpec")
        .def_property_readonly("width", &GridSpec::width)
        .def_property_readonly("height", &GridSpec::height)
        .def_property_readonly("n_cells", &GridSpec::n_cells)
        .def_property_readonly("start", [](const GridSpec& g) { return g.index(g.start()); })
        .def("goal", [](const GridSpec& g, Goal goal) { return g.index(g.goal(goal)); })
        .def("__str__", &serialize_grid);
    m.def("parse_grid", [](const std::string& text) { return parse_grid(text); });
    m.def("load_grid", &load_grid);

    py::class_<Construal>(m, "Construal")
        .def_static("full", &Construal::full)
        .def_static("notch_unaware", &Construal::notch_unaware)
        .def_property_readonly("notch_aware", &Construal::notch_aware)
        .def_property_readonly("name", &Construal::name);

    py::class_<RewardHypothesis>(m, "RewardHypothesis")
        .def(py::init([](double pink, double yellow, double step) {
                 RewardHypothesis r{pink, yellow, step};
                 r.validate();
                 return r;
             }),
             py::arg("pink"), py::arg("yellow"), py::arg("step_reward") = -0.01)
        .def_static("preferring", &RewardHypothesis::preferring, py::arg("goal"), py::arg("preferred") = 1.0,
                    py::arg("other") = 0.5, py::arg("step_reward") = -0.01)
        .def_readonly("pink", &RewardHypothesis::pink)
        .def_readonly("yellow", &RewardHypothesis::yellow)
        .def_readonly("step_reward", &RewardHypothesis::step_reward);

    m.def("compile_mdp", &compile_mdp, py::arg("grid"), py::arg("construal"), py::arg("reward"),
          py::arg("discount") = 0.95);

    // --- Demonstrations ---------------------------------------------------------
    py::class_<Trajectory>(m, "Trajectory")
        .def(py::init(&make_trajectory), py::arg("pairs"))
        .def_property_readonly("steps", [](const Trajectory& t) {
            std::vector<std::pair<int, int>> out;
            for (const Step& s : t.steps)
                out.emplace_back(s.state, s.action);
            return out;
        })
        .def_readonly("final_state", &Trajectory::final_state)
        .def_readonly("truncated", &Trajectory::truncated)
        .def_readonly("seed", &Trajectory::seed)
        .def("__len__", &Trajectory::size);

    m.def("simulate", [](const TabularMDP& truth, const TabularMDP& construed, double beta, std::uint64_t seed,
                         int max_steps) { return simulate(truth, construed, beta, seed, max_steps); },
          py::arg("true_mdp"), py::arg("construed_mdp"), py::arg("beta"), py::arg("seed"), py::arg("max_steps") = 200);
    m.def("simulate_greedy", [](const TabularMDP& truth, const TabularMDP& construed, std::uint64_t seed,
                                int max_steps) { return simulate_greedy(truth, construed, seed, max_steps); },
          py::arg("true_mdp"), py::arg("construed_mdp"), py::arg("seed") = 0, py::arg("max_steps") = 200);
    m.def("reached_goal", &reached_goal);

    // --- Inference --------------------------------------------------------------
    py::class_<HypothesisSpace>(m, "HypothesisSpace")
        .def(py::init<std::vector<RewardHypothesis>, std::vector<Construal>, Matrix>())
        .def_static("experiment", &HypothesisSpace::experiment, py::arg("preferred") = 1.0,
                    py::arg("other") = 0.5, py::arg("step_reward") = -0.01)
        .def_property_readonly("prior", &HypothesisSpace::prior);

    py::class_<Posterior>(m, "Posterior")
        .def_readonly("log_weights", &Posterior::log_weights)
        .def_readonly("log_normalizer", &Posterior::log_normalizer)
        .def_property_readonly("probabilities", &Posterior::probabilities)
        .def_property_readonly("joint", [](const Posterior& p) { return p.kind == PosteriorKind::Joint; });

    m.def("reward_only_posterior", [](const std::vector<Trajectory>& trajs, const HypothesisSpace& space,
                                      const GridSpec& grid, double beta, double gamma) {
        return reward_only_posterior(trajs, space, grid, PlanningOptions{beta, gamma, {}});
    }, py::arg("trajectories"), py::arg("space"), py::arg("grid"), py::arg("beta") = 0.1, py::arg("gamma") = 0.95);
    m.def("joint_posterior", [](const std::vector<Trajectory>& trajs, const HypothesisSpace& space,
                                const GridSpec& grid, double beta, double gamma) {
        return joint_posterior(trajs, space, grid, PlanningOptions{beta, gamma, {}});
    }, py::arg("trajectories"), py::arg("space"), py::arg("grid"), py::arg("beta") = 0.1, py::arg("gamma") = 0.95);
    m.def("reward_marginal", [](const Posterior& p) { return marginal(p, Axis::Reward); });
    m.def("construal_marginal", [](const Posterior& p) { return marginal(p, Axis::Construal); });
    m.def("preference_probability", &preference_probability);
    m.def("notch_awareness_probability", &notch_awareness_probability);
    m.def("to_judgment_scale", &to_judgment_scale);

    // --- Bounds and statistics ----------------------------------------------------
    m.def("performance_gap_bound", &performance_gap_bound, py::arg("r_max"), py::arg("gamma"), py::arg("l1"));
    m.def("dynamics_l1_gap", [](const TabularMDP& a, const TabularMDP& b) {
        return dynamics_l1_gap(a.dynamics(), b.dynamics());
    });
    m.def("verify_bound", [](const TabularMDP& truth, const TabularMDP& construed, double beta) {
        return report_dict(verify_bound(truth, construed, beta));
    }, py::arg("true_mdp"), py::arg("construed_mdp"), py::arg("beta") = 0.1);
    m.def("binomial_test_one_sided", &binomial_test_one_sided, py::arg("k"), py::arg("n"), py::arg("p0"));
    m.def("pearson_correlation", [](const std::vector<double>& x, const std::vector<double>& y) {
        const Correlation c = pearson_correlation(x, y);
        return py::make_tuple(c.r, c.p_value);
    });

    // --- Experiment ---------------------------------------------------------------
    m.def("run_experiment", [](const std::filesystem::path& config, std::optional<std::filesystem::path> out_dir) {
        const ExperimentResult r = run_experiment(load_config(config));
        if (out_dir)
            write_outputs(r, *out_dir);
        py::list rows;
        for (const ScenarioResult& s : r.results) {
            py::dict d;
            d["scenario"] = s.scenario.label();
            d["reward_only_judgment"] = s.reward_only_judgment;
            d["joint_reward_judgment"] = s.joint_reward_judgment;
            d["joint_construal_judgment"] = s.joint_construal_judgment;
            d["human_mean"] = s.human_mean;
            rows.append(d);
        }
        return rows;
    }, py::arg("config"), py::arg("out_dir") = py::none());
}
