#pragma once

#include "construal/gridworld.hpp"
#include "construal/mdp.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace construal {

struct Step {
    int state = 0;
    int action = 0;
    bool operator==(const Step&) const = default;
};

/// Observed state-action sequence. `final_state` is where the last action led.
struct Trajectory {
    std::vector<Step> steps;
    std::string grid_id;
    std::uint64_t seed = 0;
    bool truncated = false;
    std::optional<int> final_state;

    bool empty() const noexcept { return steps.empty(); }
    std::size_t size() const noexcept { return steps.size(); }
    bool operator==(const Trajectory&) const = default;
};

enum class DemonstratorKind {
    /// Boltzmann policy from soft value iteration.
    Soft,
    /// Greedy policy from hard value iteration (scripted optimal paths).
    Greedy,
};

/// Samples actions from `policy` and successors from `mdp` until a terminal
/// state is entered or `max_steps` actions were taken.
Trajectory rollout(const TabularMDP& mdp, const Policy& policy, std::uint64_t seed, int max_steps);

/**
 * Plans a soft-optimal policy on `construed_mdp` and executes it in `true_mdp`.
 * Both MDPs must share spaces, reward and discount.
 */
Trajectory simulate(const TabularMDP& true_mdp, const TabularMDP& construed_mdp, double beta,
                    std::uint64_t seed, int max_steps, const SolverOptions& opts = {});

/// Same as simulate() but plans with hard value iteration and a greedy policy.
Trajectory simulate_greedy(const TabularMDP& true_mdp, const TabularMDP& construed_mdp,
                           std::uint64_t seed, int max_steps, const SolverOptions& opts = {});

/// True when every recorded transition has positive probability under `mdp`.
bool consistent_with(const Trajectory& traj, const TabularMDP& mdp);

/// The goal cell the trajectory ends in, if any.
std::optional<Goal> reached_goal(const GridSpec& grid, const Trajectory& traj);

/// States visited, including the final state.
std::vector<int> visited_states(const Trajectory& traj);

} // namespace construal
