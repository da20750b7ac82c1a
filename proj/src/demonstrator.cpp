#include "construal/demonstrator.hpp"

#include "construal/errors.hpp"

#include <random>

namespace construal {

namespace {

// mt19937_64 output mapped to [0, 1) with 53 bits; stable across standard libraries.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

template <typename Row>
int sample_index(const Row& probs, std::mt19937_64& rng) {
    const double u = uniform01(rng);
    double acc = 0.0;
    int last_positive = 0;
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
        if (probs(i) <= 0.0)
            continue;
        acc += probs(i);
        last_positive = static_cast<int>(i);
        if (u < acc)
            return last_positive;
    }
    return last_positive;
}

void check_compatible(const TabularMDP& a, const TabularMDP& b) {
    if (a.n_states() != b.n_states() || a.n_actions() != b.n_actions())
        throw ValidationError("true and construed MDPs have different state/action spaces");
    if (a.discount() != b.discount())
        throw ValidationError("true and construed MDPs have different discounts");
    if (a.reward() != b.reward())
        throw ValidationError("true and construed MDPs have different rewards");
}

} // namespace

Trajectory rollout(const TabularMDP& mdp, const Policy& policy, std::uint64_t seed, int max_steps) {
    if (max_steps <= 0)
        throw ValidationError("max_steps must be positive");
    if (policy.n_states() != mdp.n_states() || policy.n_actions() != mdp.n_actions())
        throw ValidationError("policy shape does not match MDP");
    std::mt19937_64 rng(seed);
    Trajectory traj;
    traj.seed = seed;
    int s = sample_index(mdp.initial_dist(), rng);
    while (!mdp.is_terminal(s)) {
        if (static_cast<int>(traj.steps.size()) == max_steps) {
            traj.truncated = true;
            break;
        }
        const int a = sample_index(policy.probs().row(s), rng);
        traj.steps.push_back({s, a});
        s = sample_index(mdp.transitions(a).row(s), rng);
    }
    traj.final_state = s;
    return traj;
}

Trajectory simulate(const TabularMDP& true_mdp, const TabularMDP& construed_mdp, double beta,
                    std::uint64_t seed, int max_steps, const SolverOptions& opts) {
    check_compatible(true_mdp, construed_mdp);
    const ValueFunction v = soft_value_iteration(construed_mdp, beta, opts);
    return rollout(true_mdp, soft_policy(v, construed_mdp, beta), seed, max_steps);
}

Trajectory simulate_greedy(const TabularMDP& true_mdp, const TabularMDP& construed_mdp,
                           std::uint64_t seed, int max_steps, const SolverOptions& opts) {
    check_compatible(true_mdp, construed_mdp);
    const ValueFunction v = value_iteration(construed_mdp, opts);
    return rollout(true_mdp, greedy_policy(v), seed, max_steps);
}

bool consistent_with(const Trajectory& traj, const TabularMDP& mdp) {
    const auto states = visited_states(traj);
    for (std::size_t t = 0; t < traj.steps.size(); ++t) {
        const Step& st = traj.steps[t];
        if (st.state < 0 || st.state >= mdp.n_states() || st.action < 0 ||
            st.action >= mdp.n_actions())
            return false;
        if (t + 1 < states.size() && !(mdp.transitions(st.action)(st.state, states[t + 1]) > 0.0))
            return false;
    }
    return true;
}

std::vector<int> visited_states(const Trajectory& traj) {
    std::vector<int> out;
    out.reserve(traj.steps.size() + 1);
    for (const Step& st : traj.steps)
        out.push_back(st.state);
    if (traj.final_state)
        out.push_back(*traj.final_state);
    return out;
}

std::optional<Goal> reached_goal(const GridSpec& grid, const Trajectory& traj) {
    if (!traj.final_state || *traj.final_state < 0 || *traj.final_state >= grid.n_cells())
        return std::nullopt;
    switch (grid.at(*traj.final_state)) {
    case Cell::GoalPink: return Goal::Pink;
    case Cell::GoalYellow: return Goal::Yellow;
    default: return std::nullopt;
    }
}

} // namespace construal
