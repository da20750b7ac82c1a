#pragma once

#include "construal/demonstrator.hpp"
#include "construal/gridworld.hpp"
#include "construal/mdp.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <vector>

namespace construal {

/// Finite product space of reward hypotheses x construals with a joint prior.
class HypothesisSpace {
public:
    /// prior(i, j) is the prior mass of (rewards[i], construals[j]).
    HypothesisSpace(std::vector<RewardHypothesis> rewards, std::vector<Construal> construals,
                    Matrix prior);

    static HypothesisSpace uniform(std::vector<RewardHypothesis> rewards,
                                   std::vector<Construal> construals);

    /// {pink-preferred, yellow-preferred} x {notch-aware, notch-unaware}, uniform prior.
    static HypothesisSpace experiment(double preferred = 1.0, double other = 0.5,
                                      double step_reward = -0.01);

    const std::vector<RewardHypothesis>& rewards() const noexcept { return rewards_; }
    const std::vector<Construal>& construals() const noexcept { return construals_; }
    const Matrix& prior() const noexcept { return prior_; }
    /// Prior summed over the construal axis.
    Vector reward_prior() const { return prior_.rowwise().sum(); }

private:
    std::vector<RewardHypothesis> rewards_;
    std::vector<Construal> construals_;
    Matrix prior_;
};

enum class PosteriorKind { RewardOnly, Joint };
enum class Axis { Reward, Construal };

struct Posterior {
    PosteriorKind kind = PosteriorKind::Joint;
    /// Normalized log posterior; rewards x construals, a single column for reward-only.
    Matrix log_weights;
    /// log P(evidence).
    double log_normalizer = 0.0;

    Matrix probabilities() const {
        return log_weights.unaryExpr([](double x) { return std::exp(x); });
    }
};

struct PlanningOptions {
    double beta = 0.1;
    double discount = 0.95;
    SolverOptions solver{};
};

/// One observed trajectory together with the maze it was recorded on.
struct Demonstration {
    GridSpec grid;
    Trajectory trajectory;
};

/// Soft-optimal policies keyed by (grid, construal, reward, beta, discount). Thread-safe.
class PolicyCache {
public:
    const Policy& get(const GridSpec& grid, const Construal& construal,
                      const RewardHypothesis& reward, const PlanningOptions& opts);
    std::size_t size() const;

private:
    mutable std::mutex mu_;
    std::map<std::string, Policy> policies_;
};

/// Soft-optimal policy for the compiled (grid, construal, reward) MDP.
Policy plan_soft_policy(const GridSpec& grid, const Construal& construal,
                        const RewardHypothesis& reward, const PlanningOptions& opts);

/// sum_t log pi(a_t | s_t); 0 for an empty trajectory.
double trajectory_log_likelihood(const Trajectory& traj, const Policy& policy);

/// Reward-only posterior; every likelihood is computed under the full construal.
Posterior reward_only_posterior(std::span<const Demonstration> evidence,
                                const HypothesisSpace& space, const PlanningOptions& opts,
                                PolicyCache* cache = nullptr);
Posterior reward_only_posterior(std::span<const Trajectory> trajs, const HypothesisSpace& space,
                                const GridSpec& true_grid, const PlanningOptions& opts,
                                PolicyCache* cache = nullptr);

/// Joint reward x construal posterior.
Posterior joint_posterior(std::span<const Demonstration> evidence, const HypothesisSpace& space,
                          const PlanningOptions& opts, PolicyCache* cache = nullptr);
Posterior joint_posterior(std::span<const Trajectory> trajs, const HypothesisSpace& space,
                          const GridSpec& grid, const PlanningOptions& opts,
                          PolicyCache* cache = nullptr);

/// Normalizes prior * exp(loglik) in log space. Both tables share a shape.
Posterior normalize_posterior(const Matrix& log_likelihood, const Matrix& prior, PosteriorKind kind);

Vector marginal(const Posterior& post, Axis axis);

/// Posterior mass on reward hypotheses that prefer `goal`.
double preference_probability(const Posterior& post, const HypothesisSpace& space, Goal goal);

/// Posterior mass on construals with the given notch awareness.
double notch_awareness_probability(const Posterior& post, const HypothesisSpace& space, bool aware);

/// Maps p in [0, 1] to 2p - 1.
double to_judgment_scale(double p);

} // namespace construal
