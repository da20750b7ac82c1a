#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

namespace construal {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Tolerance applied to every row-sum check on probability vectors.
inline constexpr double kStochasticTol = 1e-12;

/**
 * Finite MDP with explicit dense dynamics.
 *
 * Dynamics are stored per action as an S x S row-stochastic matrix, so
 * transitions(a)(s, s') = T(s' | s, a). Terminal states are absorbing:
 * they self-transition under every action and carry zero reward.
 */
class TabularMDP {
public:
    TabularMDP(Vector initial_dist, std::vector<Matrix> dynamics, Matrix reward, double discount,
               std::vector<int> terminal_states = {});

    int n_states() const noexcept { return static_cast<int>(initial_.size()); }
    int n_actions() const noexcept { return static_cast<int>(dynamics_.size()); }

    const Vector& initial_dist() const noexcept { return initial_; }
    const Matrix& transitions(int action) const { return dynamics_.at(action); }
    const std::vector<Matrix>& dynamics() const noexcept { return dynamics_; }
    const Matrix& reward() const noexcept { return reward_; }
    double discount() const noexcept { return discount_; }
    const std::vector<int>& terminal_states() const noexcept { return terminal_; }
    bool is_terminal(int state) const;

    /// Q-backup R(s,a) + gamma * sum_s' T(s'|s,a) V(s') for all (s, a).
    Matrix backup(const Vector& values) const;

private:
    Vector initial_;
    std::vector<Matrix> dynamics_;
    Matrix reward_;
    double discount_;
    std::vector<int> terminal_;
};

/// Stochastic policy; probs(s, a) = pi(a | s).
class Policy {
public:
    explicit Policy(Matrix probs);

    static Policy uniform(int n_states, int n_actions);

    const Matrix& probs() const noexcept { return probs_; }
    double operator()(int state, int action) const { return probs_(state, action); }
    int n_states() const noexcept { return static_cast<int>(probs_.rows()); }
    int n_actions() const noexcept { return static_cast<int>(probs_.cols()); }

private:
    Matrix probs_;
};

struct ValueFunction {
    Vector state_values;
    Matrix action_values;
    /// Entropy weight beta; empty for unregularized solutions.
    std::optional<double> regularization;
    long iterations = 0;
    /// Final max-norm change between sweeps (0 for direct solves).
    double residual = 0.0;
};

/// Expected discounted visitations; visits(s, s+) = rho(s; s+).
struct OccupancyMatrix {
    Matrix visits;
};

struct SolverOptions {
    double tol = 1e-8;
    long max_iters = 100000;
};

/// T^pi(s' | s) = sum_a pi(a|s) T(s'|s,a).
Matrix policy_chain(const TabularMDP& mdp, const Policy& policy);

/// Exact V^pi by a dense LU solve of (I - gamma T^pi) V = r^pi.
ValueFunction policy_evaluation(const TabularMDP& mdp, const Policy& policy);

/// Successor representation (I - gamma T^pi)^-1.
OccupancyMatrix occupancy(const TabularMDP& mdp, const Policy& policy);

/// Hard Bellman iteration from V = 0. Throws ConvergenceError when max_iters is exhausted.
/// When `residual_trace` is given, the max-norm change of every sweep is appended to it.
ValueFunction value_iteration(const TabularMDP& mdp, const SolverOptions& opts = {},
                              std::vector<double>* residual_trace = nullptr);

/// Entropy-regularized iteration V(s) = beta * log sum_a exp(Q(s,a) / beta).
ValueFunction soft_value_iteration(const TabularMDP& mdp, double beta, const SolverOptions& opts = {},
                                   std::vector<double>* residual_trace = nullptr);

/// Boltzmann policy pi(a|s) proportional to exp(Q(s,a) / beta). Full support.
Policy soft_policy(const ValueFunction& values, const TabularMDP& mdp, double beta);

/// Deterministic argmax policy; ties go to the lowest action index.
Policy greedy_policy(const ValueFunction& values);

/// sum_s P0(s) V^pi(s).
double policy_return(const TabularMDP& mdp, const Policy& policy);

/// Shifted log(sum(exp(xs))). Returns -inf for an empty range.
double log_sum_exp(std::span<const double> xs);

} // namespace construal
