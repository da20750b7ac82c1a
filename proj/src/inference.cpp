#include "construal/inference.hpp"

#include "construal/errors.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace construal {

namespace {

std::string hexfloat(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", x);
    return buf;
}

std::string cache_key(const GridSpec& grid, const Construal& construal,
                      const RewardHypothesis& reward, const PlanningOptions& opts) {
    std::string key = serialize_grid(grid);
    for (const auto& [feature, aware] : construal.feature_awareness())
        key += feature + (aware ? "+" : "-");
    for (double x : {reward.pink, reward.yellow, reward.step_reward, opts.beta, opts.discount,
                     opts.solver.tol})
        key += "|" + hexfloat(x);
    key += "|" + std::to_string(opts.solver.max_iters);
    return key;
}

std::vector<Demonstration> on_grid(std::span<const Trajectory> trajs, const GridSpec& grid) {
    std::vector<Demonstration> out;
    out.reserve(trajs.size());
    for (const Trajectory& t : trajs)
        out.push_back({grid, t});
    return out;
}

} // namespace

HypothesisSpace::HypothesisSpace(std::vector<RewardHypothesis> rewards,
                                 std::vector<Construal> construals, Matrix prior)
    : rewards_(std::move(rewards)), construals_(std::move(construals)), prior_(std::move(prior)) {
    if (rewards_.empty() || construals_.empty())
        throw ValidationError("hypothesis space axes must be non-empty");
    for (const auto& r : rewards_)
        r.validate();
    if (prior_.rows() != static_cast<Eigen::Index>(rewards_.size()) ||
        prior_.cols() != static_cast<Eigen::Index>(construals_.size()))
        throw ValidationError("prior must be n_rewards x n_construals");
    if ((prior_.array() < 0.0).any() || !prior_.allFinite())
        throw ValidationError("prior has negative or non-finite entries");
    if (std::abs(prior_.sum() - 1.0) > kStochasticTol)
        throw ValidationError("prior does not sum to 1");
}

HypothesisSpace HypothesisSpace::uniform(std::vector<RewardHypothesis> rewards,
                                         std::vector<Construal> construals) {
    const auto n = static_cast<double>(rewards.size() * construals.size());
    Matrix prior = Matrix::Constant(static_cast<Eigen::Index>(rewards.size()),
                                    static_cast<Eigen::Index>(construals.size()), 1.0 / n);
    return HypothesisSpace(std::move(rewards), std::move(construals), std::move(prior));
}

HypothesisSpace HypothesisSpace::experiment(double preferred, double other, double step_reward) {
    return uniform({RewardHypothesis::preferring(Goal::Pink, preferred, other, step_reward),
                    RewardHypothesis::preferring(Goal::Yellow, preferred, other, step_reward)},
                   {Construal::full(), Construal::notch_unaware()});
}

Policy plan_soft_policy(const GridSpec& grid, const Construal& construal,
                        const RewardHypothesis& reward, const PlanningOptions& opts) {
    const TabularMDP mdp = compile_mdp(grid, construal, reward, opts.discount);
    return soft_policy(soft_value_iteration(mdp, opts.beta, opts.solver), mdp, opts.beta);
}

const Policy& PolicyCache::get(const GridSpec& grid, const Construal& construal,
                               const RewardHypothesis& reward, const PlanningOptions& opts) {
    const std::string key = cache_key(grid, construal, reward, opts);
    {
        std::lock_guard lock(mu_);
        if (auto it = policies_.find(key); it != policies_.end())
            return it->second;
    }
    Policy policy = plan_soft_policy(grid, construal, reward, opts);
    std::lock_guard lock(mu_);
    return policies_.try_emplace(key, std::move(policy)).first->second;
}

std::size_t PolicyCache::size() const {
    std::lock_guard lock(mu_);
    return policies_.size();
}

double trajectory_log_likelihood(const Trajectory& traj, const Policy& policy) {
    double total = 0.0;
    for (const Step& st : traj.steps) {
        if (st.state < 0 || st.state >= policy.n_states() || st.action < 0 ||
            st.action >= policy.n_actions())
            throw ValidationError("trajectory step outside the policy's state/action space");
        total += std::log(policy(st.state, st.action));
    }
    return total;
}

Posterior normalize_posterior(const Matrix& log_likelihood, const Matrix& prior,
                              PosteriorKind kind) {
    if (log_likelihood.rows() != prior.rows() || log_likelihood.cols() != prior.cols())
        throw ValidationError("likelihood and prior tables differ in shape");
    Posterior post;
    post.kind = kind;
    post.log_weights = prior.array().log().matrix() + log_likelihood;
    std::vector<double> flat(post.log_weights.data(),
                             post.log_weights.data() + post.log_weights.size());
    post.log_normalizer = log_sum_exp(flat);
    if (!std::isfinite(post.log_normalizer))
        throw ValidationError("evidence has zero probability under every hypothesis");
    post.log_weights.array() -= post.log_normalizer;
    return post;
}

Posterior reward_only_posterior(std::span<const Demonstration> evidence,
                                const HypothesisSpace& space, const PlanningOptions& opts,
                                PolicyCache* cache) {
    const auto n_rewards = static_cast<Eigen::Index>(space.rewards().size());
    Matrix loglik = Matrix::Zero(n_rewards, 1);
    PolicyCache local;
    PolicyCache& policies = cache ? *cache : local;
    const Construal full = Construal::full();
    for (Eigen::Index i = 0; i < n_rewards; ++i)
        for (const Demonstration& d : evidence)
            loglik(i, 0) += trajectory_log_likelihood(
                d.trajectory, policies.get(d.grid, full, space.rewards()[i], opts));
    return normalize_posterior(loglik, space.reward_prior(), PosteriorKind::RewardOnly);
}

Posterior reward_only_posterior(std::span<const Trajectory> trajs, const HypothesisSpace& space,
                                const GridSpec& true_grid, const PlanningOptions& opts,
                                PolicyCache* cache) {
    const auto evidence = on_grid(trajs, true_grid);
    return reward_only_posterior(evidence, space, opts, cache);
}

Posterior joint_posterior(std::span<const Demonstration> evidence, const HypothesisSpace& space,
                          const PlanningOptions& opts, PolicyCache* cache) {
    const auto n_rewards = static_cast<Eigen::Index>(space.rewards().size());
    const auto n_construals = static_cast<Eigen::Index>(space.construals().size());
    Matrix loglik = Matrix::Zero(n_rewards, n_construals);
    PolicyCache local;
    PolicyCache& policies = cache ? *cache : local;
    for (Eigen::Index i = 0; i < n_rewards; ++i)
        for (Eigen::Index j = 0; j < n_construals; ++j)
            for (const Demonstration& d : evidence)
                loglik(i, j) += trajectory_log_likelihood(
                    d.trajectory, policies.get(d.grid, space.construals()[j], space.rewards()[i], opts));
    return normalize_posterior(loglik, space.prior(), PosteriorKind::Joint);
}

Posterior joint_posterior(std::span<const Trajectory> trajs, const HypothesisSpace& space,
                          const GridSpec& grid, const PlanningOptions& opts, PolicyCache* cache) {
    const auto evidence = on_grid(trajs, grid);
    return joint_posterior(evidence, space, opts, cache);
}

Vector marginal(const Posterior& post, Axis axis) {
    const Matrix p = post.probabilities();
    if (axis == Axis::Reward)
        return p.rowwise().sum();
    if (post.kind == PosteriorKind::RewardOnly)
        throw ValidationError("a reward-only posterior has no construal axis");
    return p.colwise().sum().transpose();
}

double preference_probability(const Posterior& post, const HypothesisSpace& space, Goal goal) {
    const Vector m = marginal(post, Axis::Reward);
    if (m.size() != static_cast<Eigen::Index>(space.rewards().size()))
        throw ValidationError("posterior does not match hypothesis space");
    double p = 0.0;
    for (Eigen::Index i = 0; i < m.size(); ++i)
        if (space.rewards()[i].preferred() == goal)
            p += m(i);
    return p;
}

double notch_awareness_probability(const Posterior& post, const HypothesisSpace& space,
                                   bool aware) {
    const Vector m = marginal(post, Axis::Construal);
    if (m.size() != static_cast<Eigen::Index>(space.construals().size()))
        throw ValidationError("posterior does not match hypothesis space");
    double p = 0.0;
    for (Eigen::Index j = 0; j < m.size(); ++j)
        if (space.construals()[j].notch_aware() == aware)
            p += m(j);
    return p;
}

double to_judgment_scale(double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw ValidationError("probability must lie in [0, 1]");
    return 2.0 * p - 1.0;
}

} // namespace construal
