// Acceptance checks. Prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails.

#include "construal/bounds.hpp"
#include "construal/experiment.hpp"
#include "construal/inference.hpp"
#include "construal/stats.hpp"

#include "oracles.hpp"
#include "support.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

using namespace construal;
namespace fs = std::filesystem;

namespace {

const fs::path kData = CONSTRUAL_DATA_DIR;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty())
                detail += "; ";
            detail += what;
        }
    }
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

const ExperimentResult& run_with(DemonstratorKind kind) {
    static std::map<DemonstratorKind, ExperimentResult> runs;
    auto it = runs.find(kind);
    if (it == runs.end()) {
        ExperimentConfig cfg = load_config(kData / "experiment.cfg");
        cfg.demonstrator = kind;
        it = runs.emplace(kind, run_experiment(cfg)).first;
    }
    return it->second;
}

const char* kind_name(DemonstratorKind k) { return k == DemonstratorKind::Soft ? "soft" : "greedy"; }

std::vector<GridSpec> fixture_grids() {
    std::vector<GridSpec> out;
    for (const char* f : {"grid1.txt", "grid2.txt", "grid3.txt"})
        out.push_back(load_grid(kData / "grids" / f));
    return out;
}

// ---------------------------------------------------------------------------

Outcome failure_mode() {
    Outcome o;
    for (DemonstratorKind kind : {DemonstratorKind::Soft, DemonstratorKind::Greedy}) {
        const std::string tag = std::string(kind_name(kind)) + " ";
        for (const ScenarioResult& r : run_with(kind).results) {
            const std::string label = tag + r.scenario.label();
            if (r.scenario == Scenario{false, Goal::Pink}) {
                o.require(r.reward_only_judgment < -0.5, label + " reward-only " + fmt(r.reward_only_judgment));
                o.require(r.joint_reward_judgment > 0.5, label + " joint " + fmt(r.joint_reward_judgment));
            } else {
                const double sign = r.scenario.preferred == Goal::Pink ? 1.0 : -1.0;
                o.require(sign * r.reward_only_judgment > 0, label + " reward-only " + fmt(r.reward_only_judgment));
                o.require(sign * r.joint_reward_judgment > 0, label + " joint " + fmt(r.joint_reward_judgment));
            }
        }
    }
    if (o.pass) {
        const auto& rows = run_with(DemonstratorKind::Soft).results;
        o.detail = "unaware_pink reward-only " + fmt(rows[1].reward_only_judgment) + ", joint " +
                   fmt(rows[1].joint_reward_judgment) + " (soft and greedy demonstrators)";
    }
    return o;
}

Outcome construal_recovery() {
    Outcome o;
    double worst = 1.0;
    for (DemonstratorKind kind : {DemonstratorKind::Soft, DemonstratorKind::Greedy}) {
        const ExperimentResult& run = run_with(kind);
        for (const ScenarioInference& inf : run.pooled) {
            const double p = notch_awareness_probability(inf.joint, run.space, inf.scenario.notch_aware);
            worst = std::min(worst, p);
            o.require(p > 0.9, std::string(kind_name(kind)) + " " + inf.scenario.label() + " " + fmt(p));
        }
    }
    if (o.pass)
        o.detail = "min P(true construal) = " + fmt(worst);
    return o;
}

Outcome consistency_collapse() {
    Outcome o;
    std::mt19937_64 rng(2024);
    const auto grids = fixture_grids();
    const HypothesisSpace base = HypothesisSpace::experiment();
    const HypothesisSpace single(base.rewards(), {Construal::full()}, base.reward_prior());
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const GridSpec& g = grids[trial % 3];
        std::vector<Trajectory> trajs;
        for (int k = 0; k < 1 + trial % 4; ++k) {
            if ((trial + k) % 2 == 0) {
                const RewardHypothesis r = base.rewards()[k % 2];
                const TabularMDP m = compile_mdp(g, Construal::full(), r, 0.95);
                trajs.push_back(simulate(m, m, 0.3, rng(), 60));
            } else {
                trajs.push_back(testing_support::random_pairs(rng, g.n_cells(), 4, 1 + trial % 12));
            }
        }
        const Matrix ro = reward_only_posterior(trajs, single, g, {}).probabilities();
        const Matrix jt = joint_posterior(trajs, single, g, {}).probabilities();
        worst = std::max(worst, (ro - jt).cwiseAbs().maxCoeff());
    }
    o.require(worst <= 1e-12, "max entrywise difference " + fmt(worst));
    if (o.pass)
        o.detail = "50 sets, max entrywise difference " + fmt(worst);
    return o;
}

Outcome oracle_equivalence() {
    Outcome o;
    std::mt19937_64 rng(4242);
    int instances = 0;
    double eval_err = 0, occ_err = 0, post_err = 0;

    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + trial % 7;
        const double gamma = 0.5 + 0.45 * (trial % 10) / 10.0;
        const TabularMDP m = testing_support::random_mdp(rng, n, 1 + trial % 4, gamma, trial % 3 == 0);
        const Policy pi = testing_support::random_policy(rng, n, m.n_actions());
        const auto ref_v = oracle::policy_values(m, pi);
        const Vector v = policy_evaluation(m, pi).state_values;
        for (int s = 0; s < n; ++s)
            eval_err = std::max(eval_err, static_cast<double>(std::fabs(v(s) - ref_v[s])));
        const auto ref_occ = oracle::occupancy(m, pi);
        const Matrix occ = occupancy(m, pi).visits;
        for (int s = 0; s < n; ++s)
            for (int t = 0; t < n; ++t)
                occ_err = std::max(occ_err, static_cast<double>(std::fabs(occ(s, t) - ref_occ[s][t])));
        ++instances;
    }

    const std::pair<int, int> shapes[] = {{2, 2}, {3, 2}, {2, 3}, {4, 2}, {2, 4}};
    const PlanningOptions opts{0.5, 0.9, {1e-13, 100000}};
    for (int trial = 0; trial < 100; ++trial) {
        const auto [w, h] = shapes[trial % 5];
        const GridSpec g = parse_grid(testing_support::random_open_grid(rng, w, h));
        Matrix prior(2, 2);
        prior.reshaped() = testing_support::random_simplex(rng, 4);
        const HypothesisSpace base = HypothesisSpace::experiment();
        const HypothesisSpace space(base.rewards(), base.construals(), prior);
        std::vector<Trajectory> trajs;
        std::vector<std::vector<std::pair<int, int>>> pairs;
        for (int k = 0; k < 1 + trial % 3; ++k) {
            trajs.push_back(testing_support::random_pairs(rng, g.n_cells(), 4, 1 + (trial + k) % 8));
            pairs.emplace_back();
            for (const Step& s : trajs.back().steps)
                pairs.back().push_back({s.state, s.action});
        }
        std::vector<oracle::Mat> policies;
        std::vector<double> flat;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                const RewardHypothesis& r = space.rewards()[i];
                policies.push_back(oracle::GridOracle{g, j == 0, r.pink, r.yellow, r.step_reward}.soft_policy(
                    opts.beta, opts.discount));
                flat.push_back(prior(i, j));
            }
        const auto ref_joint = oracle::enumerate_posterior(policies, flat, pairs);
        const Vector rp = prior.rowwise().sum();
        const auto ref_ro = oracle::enumerate_posterior({policies[0], policies[2]}, {rp(0), rp(1)}, pairs);
        const Matrix jt = joint_posterior(trajs, space, g, opts).probabilities();
        const Matrix ro = reward_only_posterior(trajs, space, g, opts).probabilities();
        for (int i = 0; i < 2; ++i) {
            post_err = std::max(post_err, std::fabs(ro(i, 0) - static_cast<double>(ref_ro[i])));
            for (int j = 0; j < 2; ++j)
                post_err = std::max(post_err, std::fabs(jt(i, j) - static_cast<double>(ref_joint[i * 2 + j])));
        }
        ++instances;
    }

    o.require(eval_err <= 1e-9, "policy evaluation error " + fmt(eval_err));
    o.require(occ_err <= 1e-9, "occupancy error " + fmt(occ_err));
    o.require(post_err <= 1e-10, "posterior error " + fmt(post_err));
    o.require(instances >= 100, "only " + std::to_string(instances) + " instances");
    if (o.pass)
        o.detail = std::to_string(instances) + " instances; max errors: evaluation " + fmt(eval_err) +
                   ", occupancy " + fmt(occ_err) + ", posteriors " + fmt(post_err);
    return o;
}

Outcome bound_verification() {
    Outcome o;
    std::mt19937_64 rng(77);
    int checked = 0;
    double tightest = 0.0; // largest gap / bound ratio seen
    auto check = [&](const BoundReport& rep, const std::string& what) {
        ++checked;
        o.require(rep.empirical_gap <= rep.bound_value + kBoundSlack,
                  what + " gap " + fmt(rep.empirical_gap) + " > bound " + fmt(rep.bound_value));
        if (rep.bound_value > 0)
            tightest = std::max(tightest, rep.empirical_gap / rep.bound_value);
    };
    for (int trial = 0; trial < 100; ++trial) {
        const double gamma = 0.3 + 0.6 * (trial % 7) / 6.0;
        const TabularMDP m = testing_support::random_mdp(rng, 4 + trial % 5, 2 + trial % 3, gamma, trial % 3 == 0);
        const TabularMDP p = testing_support::perturb(rng, m, 0.05 + 0.9 * (trial % 10) / 10.0);
        check(verify_bound(m, p, 0.05 + (trial % 4) * 0.3), "random pair " + std::to_string(trial));
    }
    const auto grids = fixture_grids();
    for (std::size_t gi = 0; gi < grids.size(); ++gi)
        for (Goal goal : {Goal::Pink, Goal::Yellow}) {
            const RewardHypothesis r = RewardHypothesis::preferring(goal);
            const TabularMDP truth = compile_mdp(grids[gi], Construal::full(), r, 0.95);
            const TabularMDP construed = compile_mdp(grids[gi], Construal::notch_unaware(), r, 0.95);
            for (double beta : {1e-3, 0.1})
                check(verify_bound(truth, construed, beta), "grid" + std::to_string(gi + 1) + " " + goal_name(goal));
        }

    bool monotone = true;
    const double rs[] = {0.0, 0.5, 1.0, 2.0, 5.0}, gs[] = {0.0, 0.25, 0.5, 0.9, 0.99}, ls[] = {0.0, 0.5, 1.0, 1.5, 2.0};
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            for (int k = 0; k < 5; ++k) {
                const double b = performance_gap_bound(rs[i], gs[j], ls[k]);
                if (i < 4 && performance_gap_bound(rs[i + 1], gs[j], ls[k]) < b)
                    monotone = false;
                if (j < 4 && performance_gap_bound(rs[i], gs[j + 1], ls[k]) < b)
                    monotone = false;
                if (k < 4 && performance_gap_bound(rs[i], gs[j], ls[k + 1]) < b)
                    monotone = false;
            }
    o.require(monotone, "bound not monotone over the parameter grid");
    if (o.pass)
        o.detail = std::to_string(checked) + " pairs satisfied (max gap/bound " + fmt(tightest) +
                   "); monotone over 125-point grid";
    return o;
}

Outcome statistics() {
    Outcome o;
    // Agreement to 3 significant figures: within half a unit of the third digit.
    auto sig3 = [](double a, double b) { return std::fabs(a - b) <= 0.005 * std::fabs(b); };
    const struct {
        int k;
        double expected;
    } rows[] = {{99, 7.967e-29}, {70, 3.925e-05}, {98, 3.984e-27}};
    std::string got;
    for (const auto& r : rows) {
        const double p = binomial_test_one_sided(r.k, 100, 0.5);
        o.require(sig3(p, r.expected), "k=" + std::to_string(r.k) + " gives " + fmt(p) + ", expected " + fmt(r.expected));
        got += (got.empty() ? "" : ", ") + std::to_string(r.k) + "/100 -> " + fmt(p);
    }
    if (o.pass)
        o.detail = got;
    return o;
}

Outcome correlation_ordering() {
    Outcome o;
    const HumanSummary human = ingest_human_summary(kData / "human_summary.csv");
    std::string summary;
    for (DemonstratorKind kind : {DemonstratorKind::Soft, DemonstratorKind::Greedy}) {
        const ComparisonReport rep = compare_models(run_with(kind).results, human);
        const double rj = rep.joint.correlation.r, rr = rep.reward_only.correlation.r;
        o.require(rj > rr, std::string(kind_name(kind)) + " joint r " + fmt(rj) + " <= reward-only r " + fmt(rr));
        o.require(rj >= 0.9, std::string(kind_name(kind)) + " joint r " + fmt(rj) + " < 0.9");
        if (kind == DemonstratorKind::Soft)
            summary = "joint r " + fmt(rj) + " vs reward-only r " + fmt(rr) + " (n=4, summary data)";
    }
    if (o.pass)
        o.detail = summary;
    return o;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Outcome determinism() {
    Outcome o;
    const fs::path root = fs::temp_directory_path() / "construal_acceptance";
    fs::remove_all(root);
    fs::create_directories(root);
    for (const char* name : {"a", "b"}) {
        const std::string cmd = std::string("\"") + CONSTRUAL_CLI + "\" run --config \"" +
                                (kData / "experiment.cfg").string() + "\" --out \"" + (root / name).string() + "\"";
        if (std::system(cmd.c_str()) != 0) {
            o.require(false, std::string("run ") + name + " failed");
            return o;
        }
    }
    std::map<fs::path, std::string> a, b;
    for (auto [dir, files] : {std::pair{root / "a", &a}, std::pair{root / "b", &b}})
        for (const auto& e : fs::recursive_directory_iterator(dir))
            if (e.is_regular_file())
                (*files)[fs::relative(e.path(), dir)] = slurp(e.path());
    o.require(!a.empty(), "no output files");
    o.require(a.size() == b.size(), "file counts differ");
    for (const auto& [rel, text] : a) {
        const auto it = b.find(rel);
        o.require(it != b.end() && it->second == text, rel.string() + " differs");
    }
    if (o.pass)
        o.detail = std::to_string(a.size()) + " files byte-identical";
    return o;
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"failure-mode reproduction", failure_mode},
        {"construal recovery", construal_recovery},
        {"consistency collapse", consistency_collapse},
        {"oracle equivalence", oracle_equivalence},
        {"bound verification", bound_verification},
        {"statistics reproduction", statistics},
        {"correlation ordering", correlation_ordering},
        {"determinism", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << i + 1 << " (" << criteria[i].first
                  << "): " << o.detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
