#pragma once

#include "construal/bounds.hpp"
#include "construal/demonstrator.hpp"
#include "construal/gridworld.hpp"
#include "construal/inference.hpp"
#include "construal/stats.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace construal {

/// A demonstrator type: the construal it plans with and the goal it prefers.
struct Scenario {
    bool notch_aware = true;
    Goal preferred = Goal::Pink;

    /// "aware_pink", "unaware_yellow", ...
    std::string label() const;
    static Scenario from_label(const std::string& label);
    Construal construal() const { return notch_aware ? Construal::full() : Construal::notch_unaware(); }

    bool operator==(const Scenario&) const = default;
};

/// aware_pink, unaware_pink, aware_yellow, unaware_yellow.
const std::array<Scenario, 4>& all_scenarios();

enum class Question { Reward, Construal };
const char* question_name(Question q);
Question question_from_name(const std::string& name);

// ---------------------------------------------------------------------------
// Human judgments

/// Aggregated +-1 responses. A positive answer means "prefers pink" for the
/// reward question and "realized they could walk through notches" for the
/// construal question.
struct HumanRecord {
    std::string scenario;
    Question question = Question::Reward;
    int n_respondents = 0;
    double proportion_positive = 0.0;
    double mean_score = 0.0;
    double standard_error = 0.0;
};

struct HumanSummary {
    std::vector<HumanRecord> records;

    const HumanRecord* find(const std::string& scenario, Question q) const;
};

/// Validates and derives mean_score = 2p - 1 and SE = 2 sqrt(p(1-p)/n).
HumanRecord make_human_record(std::string scenario, Question q, int n, double proportion_positive);

/**
 * Reads either a summary CSV (`scenario,question,n,proportion_positive`) or a
 * per-participant CSV (`participant,scenario,question,response` with responses
 * coded 1/-1 or true/false). Throws std::runtime_error naming the row on bad input.
 */
HumanSummary ingest_human_summary(const std::filesystem::path& csv);
HumanSummary parse_human_csv(const std::string& text);

// ---------------------------------------------------------------------------
// Configuration

struct GridEntry {
    std::string id;
    std::filesystem::path path;
};

struct ExperimentConfig {
    std::vector<GridEntry> grids;
    /// Likelihood temperature used by both inference models.
    double beta = 0.1;
    /// Demonstrator temperature; small values give near-deterministic paths.
    double demo_beta = 1e-3;
    double gamma = 0.95;
    double tol = 1e-8;
    long max_iters = 100000;
    int max_steps = 200;
    double preferred_reward = 1.0;
    double other_reward = 0.5;
    double step_reward = -0.01;
    std::uint64_t seed = 20240101;
    DemonstratorKind demonstrator = DemonstratorKind::Soft;
    std::optional<std::filesystem::path> human_data;

    PlanningOptions planning() const { return {beta, gamma, {tol, max_iters}}; }
    SolverOptions solver() const { return {tol, max_iters}; }
    HypothesisSpace hypotheses() const {
        return HypothesisSpace::experiment(preferred_reward, other_reward, step_reward);
    }
};

/// `key = value` lines, `#` comments; `grid` may repeat as `grid = [id:]path`.
/// Relative paths resolve against `base_dir`.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Experiment

struct ScenarioResult {
    std::string grid_id; // "pooled" for the 3-grid aggregate
    Scenario scenario;
    double reward_only_judgment = 0.0;
    double joint_reward_judgment = 0.0;
    double joint_construal_judgment = 0.0;
    std::optional<double> human_mean;
    std::optional<double> human_se;
};

struct DemonstrationRecord {
    std::string grid_id;
    Scenario scenario;
    Trajectory trajectory;
    std::optional<Goal> reached;
};

struct ScenarioInference {
    Scenario scenario;
    Posterior reward_only;
    Posterior joint;
};

/// Gap between learners acting on the two models' MAP hypotheses, per grid.
struct LearnerGap {
    std::string grid_id;
    Scenario scenario;
    BoundReport report;
};

struct GridBound {
    std::string grid_id;
    Goal preferred = Goal::Pink;
    BoundReport report;
};

struct ExperimentResult {
    ExperimentConfig config;
    HypothesisSpace space;
    std::vector<GridEntry> grid_entries;
    std::vector<GridSpec> grids;
    std::vector<DemonstrationRecord> demonstrations;
    /// One per scenario, pooled over all grids.
    std::vector<ScenarioInference> pooled;
    /// One per demonstration, diagnostics only.
    std::vector<ScenarioInference> per_trajectory;
    std::vector<ScenarioResult> results;
    std::vector<GridBound> grid_bounds;
    std::vector<LearnerGap> learner_gaps;
};

/// Throws unless, for every grid and construal, each reward hypothesis drives a
/// greedy planner to its preferred goal whenever that goal is reachable.
void check_preference_dominance(const GridSpec& grid, const std::string& grid_id,
                                const ExperimentConfig& cfg);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Writes every report into `out_dir` (created if missing).
void write_outputs(const ExperimentResult& result, const std::filesystem::path& out_dir);

struct ModelCorrelation {
    std::string model;
    Correlation correlation;
};

struct ComparisonReport {
    std::vector<ScenarioResult> rows;
    ModelCorrelation reward_only;
    ModelCorrelation joint;
};

/// Pearson r between each model's pooled reward judgments and the human means.
/// Throws std::runtime_error listing scenarios missing on either side.
ComparisonReport compare_models(const std::vector<ScenarioResult>& results,
                                const HumanSummary& human);

} // namespace construal
