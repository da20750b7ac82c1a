#pragma once

#include "construal/mdp.hpp"

#include <vector>

namespace construal {

/// Empirical performance gap next to the dynamics-mismatch bound.
struct BoundReport {
    double r_max = 0.0;
    double gamma = 0.0;
    double l1_gap = 0.0;
    double bound_value = 0.0;
    double empirical_gap = 0.0;
    bool satisfied = true;
};

/// Slack allowed when comparing an empirical gap against the bound.
inline constexpr double kBoundSlack = 1e-9;

/// max over (s, a) of || T(.|s,a) - T~(.|s,a) ||_1.
double dynamics_l1_gap(const std::vector<Matrix>& dynamics, const std::vector<Matrix>& construed);

/// gamma * r_max * l1 / (1 - gamma)^2.
double performance_gap_bound(double r_max, double gamma, double l1);

/// max over (s, a) of |R(s, a)|.
double reward_magnitude(const TabularMDP& mdp);

/// |v^a - v^b| on the true MDP.
double empirical_gap(const TabularMDP& true_mdp, const Policy& policy_a, const Policy& policy_b);

BoundReport make_report(double r_max, double gamma, double l1, double gap);

/**
 * Plans soft-optimal policies under the construed and the true dynamics
 * (same reward), evaluates both on the true MDP and compares the gap to the bound.
 */
BoundReport verify_bound(const TabularMDP& true_mdp, const TabularMDP& construed_mdp, double beta,
                         const SolverOptions& opts = {});

} // namespace construal
