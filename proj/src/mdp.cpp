#include "construal/mdp.hpp"

#include "construal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace construal {

namespace {

void check_distribution(const Eigen::Ref<const Vector>& row, const std::string& what) {
    if ((row.array() < 0.0).any() || !row.allFinite())
        throw ValidationError(what + " has negative or non-finite entries");
    if (std::abs(row.sum() - 1.0) > kStochasticTol)
        throw ValidationError(what + " does not sum to 1 (sum = " + std::to_string(row.sum()) + ")");
}

void check_policy_shape(const TabularMDP& mdp, const Policy& policy) {
    if (policy.n_states() != mdp.n_states() || policy.n_actions() != mdp.n_actions())
        throw ValidationError("policy shape does not match MDP");
}

Eigen::PartialPivLU<Matrix> resolvent(const TabularMDP& mdp, const Policy& policy) {
    const int n = mdp.n_states();
    Matrix system = Matrix::Identity(n, n) - mdp.discount() * policy_chain(mdp, policy);
    return Eigen::PartialPivLU<Matrix>(system);
}

} // namespace

double log_sum_exp(std::span<const double> xs) {
    if (xs.empty())
        return -std::numeric_limits<double>::infinity();
    const double hi = *std::max_element(xs.begin(), xs.end());
    if (!std::isfinite(hi))
        return hi;
    double acc = 0.0;
    for (double x : xs)
        acc += std::exp(x - hi);
    return hi + std::log(acc);
}

TabularMDP::TabularMDP(Vector initial_dist, std::vector<Matrix> dynamics, Matrix reward,
                       double discount, std::vector<int> terminal_states)
    : initial_(std::move(initial_dist)), dynamics_(std::move(dynamics)), reward_(std::move(reward)),
      discount_(discount), terminal_(std::move(terminal_states)) {
    const Eigen::Index n = initial_.size();
    if (n == 0)
        throw ValidationError("MDP needs at least one state");
    if (dynamics_.empty())
        throw ValidationError("MDP needs at least one action");
    if (!(discount_ >= 0.0 && discount_ < 1.0))
        throw ValidationError("discount must lie in [0, 1)");
    check_distribution(initial_, "initial distribution");
    if (reward_.rows() != n || reward_.cols() != static_cast<Eigen::Index>(dynamics_.size()))
        throw ValidationError("reward matrix must be n_states x n_actions");
    if (!reward_.allFinite())
        throw ValidationError("reward has non-finite entries");
    for (std::size_t a = 0; a < dynamics_.size(); ++a) {
        const Matrix& t = dynamics_[a];
        if (t.rows() != n || t.cols() != n)
            throw ValidationError("dynamics for action " + std::to_string(a) + " must be n x n");
        for (Eigen::Index s = 0; s < n; ++s)
            check_distribution(t.row(s).transpose(), "dynamics row (s=" + std::to_string(s) +
                                                         ", a=" + std::to_string(a) + ")");
    }
    std::sort(terminal_.begin(), terminal_.end());
    terminal_.erase(std::unique(terminal_.begin(), terminal_.end()), terminal_.end());
    for (int s : terminal_) {
        if (s < 0 || s >= n)
            throw ValidationError("terminal state index out of range");
        for (const Matrix& t : dynamics_)
            if (t(s, s) != 1.0)
                throw ValidationError("terminal state " + std::to_string(s) + " is not absorbing");
        if ((reward_.row(s).array() != 0.0).any())
            throw ValidationError("terminal state " + std::to_string(s) + " has nonzero reward");
    }
}

bool TabularMDP::is_terminal(int state) const {
    return std::binary_search(terminal_.begin(), terminal_.end(), state);
}

Matrix TabularMDP::backup(const Vector& values) const {
    Matrix q = reward_;
    for (int a = 0; a < n_actions(); ++a)
        q.col(a).noalias() += discount_ * (dynamics_[a] * values);
    return q;
}

Policy::Policy(Matrix probs) : probs_(std::move(probs)) {
    if (probs_.rows() == 0 || probs_.cols() == 0)
        throw ValidationError("policy must be non-empty");
    for (Eigen::Index s = 0; s < probs_.rows(); ++s)
        check_distribution(probs_.row(s).transpose(), "policy row " + std::to_string(s));
}

Policy Policy::uniform(int n_states, int n_actions) {
    return Policy(Matrix::Constant(n_states, n_actions, 1.0 / n_actions));
}

Matrix policy_chain(const TabularMDP& mdp, const Policy& policy) {
    check_policy_shape(mdp, policy);
    const int n = mdp.n_states();
    Matrix chain = Matrix::Zero(n, n);
    for (int a = 0; a < mdp.n_actions(); ++a)
        chain.noalias() += policy.probs().col(a).asDiagonal() * mdp.transitions(a);
    return chain;
}

ValueFunction policy_evaluation(const TabularMDP& mdp, const Policy& policy) {
    check_policy_shape(mdp, policy);
    const Vector r_pi = mdp.reward().cwiseProduct(policy.probs()).rowwise().sum();
    ValueFunction out;
    out.state_values = resolvent(mdp, policy).solve(r_pi);
    out.action_values = mdp.backup(out.state_values);
    return out;
}

OccupancyMatrix occupancy(const TabularMDP& mdp, const Policy& policy) {
    check_policy_shape(mdp, policy);
    const int n = mdp.n_states();
    return {resolvent(mdp, policy).solve(Matrix::Identity(n, n))};
}

ValueFunction value_iteration(const TabularMDP& mdp, const SolverOptions& opts,
                              std::vector<double>* residual_trace) {
    if (!(opts.tol > 0.0))
        throw ValidationError("tol must be positive");
    Vector v = Vector::Zero(mdp.n_states());
    double residual = std::numeric_limits<double>::infinity();
    for (long it = 1; it <= opts.max_iters; ++it) {
        Matrix q = mdp.backup(v);
        Vector next = q.rowwise().maxCoeff();
        residual = (next - v).cwiseAbs().maxCoeff();
        if (residual_trace)
            residual_trace->push_back(residual);
        v = std::move(next);
        if (residual < opts.tol) {
            // One more backup so that V = max_a Q holds exactly for the returned pair.
            Matrix qf = mdp.backup(v);
            Vector vf = qf.rowwise().maxCoeff();
            return {std::move(vf), std::move(qf), std::nullopt, it, residual};
        }
    }
    throw ConvergenceError("value iteration did not converge", residual, opts.max_iters);
}

namespace {

/// beta * log sum_a exp(Q(s, a) / beta), shifted by the row maximum.
Vector soft_max(const Matrix& q, double beta) {
    const Vector hi = q.rowwise().maxCoeff();
    Vector out(q.rows());
    for (Eigen::Index s = 0; s < q.rows(); ++s)
        out(s) = hi(s) + beta * std::log(((q.row(s).array() - hi(s)) / beta).exp().sum());
    return out;
}

} // namespace

ValueFunction soft_value_iteration(const TabularMDP& mdp, double beta, const SolverOptions& opts,
                                   std::vector<double>* residual_trace) {
    if (!(beta > 0.0))
        throw ValidationError("beta must be positive");
    if (!(opts.tol > 0.0))
        throw ValidationError("tol must be positive");
    Vector v = Vector::Zero(mdp.n_states());
    double residual = std::numeric_limits<double>::infinity();
    for (long it = 1; it <= opts.max_iters; ++it) {
        Vector next = soft_max(mdp.backup(v), beta);
        residual = (next - v).cwiseAbs().maxCoeff();
        if (residual_trace)
            residual_trace->push_back(residual);
        v = std::move(next);
        if (residual < opts.tol) {
            Matrix qf = mdp.backup(v);
            Vector vf = soft_max(qf, beta);
            return {std::move(vf), std::move(qf), beta, it, residual};
        }
    }
    throw ConvergenceError("soft value iteration did not converge", residual, opts.max_iters);
}

Policy soft_policy(const ValueFunction& values, const TabularMDP& mdp, double beta) {
    if (!(beta > 0.0))
        throw ValidationError("beta must be positive");
    if (values.action_values.rows() != mdp.n_states() ||
        values.action_values.cols() != mdp.n_actions())
        throw ValidationError("action values do not match MDP shape");
    if (values.regularization && *values.regularization != beta)
        throw ValidationError("values were computed with a different beta");
    const Matrix& q = values.action_values;
    Matrix probs(q.rows(), q.cols());
    for (Eigen::Index s = 0; s < q.rows(); ++s) {
        const double hi = q.row(s).maxCoeff();
        probs.row(s) = ((q.row(s).array() - hi) / beta).exp();
        probs.row(s) /= probs.row(s).sum();
    }
    return Policy(std::move(probs));
}

Policy greedy_policy(const ValueFunction& values) {
    const Matrix& q = values.action_values;
    Matrix probs = Matrix::Zero(q.rows(), q.cols());
    for (Eigen::Index s = 0; s < q.rows(); ++s) {
        Eigen::Index best = 0;
        for (Eigen::Index a = 1; a < q.cols(); ++a)
            if (q(s, a) > q(s, best))
                best = a;
        probs(s, best) = 1.0;
    }
    return Policy(std::move(probs));
}

double policy_return(const TabularMDP& mdp, const Policy& policy) {
    return mdp.initial_dist().dot(policy_evaluation(mdp, policy).state_values);
}

} // namespace construal
