#include "construal/bounds.hpp"

#include "construal/errors.hpp"

#include <algorithm>
#include <cmath>

namespace construal {

double dynamics_l1_gap(const std::vector<Matrix>& dynamics, const std::vector<Matrix>& construed) {
    if (dynamics.size() != construed.size())
        throw ValidationError("dynamics have different action counts");
    double worst = 0.0;
    for (std::size_t a = 0; a < dynamics.size(); ++a) {
        if (dynamics[a].rows() != construed[a].rows() || dynamics[a].cols() != construed[a].cols())
            throw ValidationError("dynamics have different state counts");
        worst = std::max(worst, (dynamics[a] - construed[a]).cwiseAbs().rowwise().sum().maxCoeff());
    }
    return worst;
}

double performance_gap_bound(double r_max, double gamma, double l1) {
    if (!(r_max >= 0.0) || !std::isfinite(r_max))
        throw ValidationError("r_max must be a finite nonnegative number");
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw ValidationError("gamma must lie in [0, 1)");
    if (!(l1 >= 0.0 && l1 <= 2.0))
        throw ValidationError("l1 gap must lie in [0, 2]");
    return gamma * r_max * l1 / ((1.0 - gamma) * (1.0 - gamma));
}

double reward_magnitude(const TabularMDP& mdp) { return mdp.reward().cwiseAbs().maxCoeff(); }

double empirical_gap(const TabularMDP& true_mdp, const Policy& policy_a, const Policy& policy_b) {
    return std::abs(policy_return(true_mdp, policy_a) - policy_return(true_mdp, policy_b));
}

BoundReport make_report(double r_max, double gamma, double l1, double gap) {
    BoundReport rep;
    rep.r_max = r_max;
    rep.gamma = gamma;
    // Row L1 distances of stochastic rows can exceed 2 by rounding.
    rep.l1_gap = std::min(l1, 2.0);
    rep.bound_value = performance_gap_bound(r_max, gamma, rep.l1_gap);
    rep.empirical_gap = gap;
    rep.satisfied = std::abs(gap) <= rep.bound_value + kBoundSlack;
    return rep;
}

BoundReport verify_bound(const TabularMDP& true_mdp, const TabularMDP& construed_mdp, double beta,
                         const SolverOptions& opts) {
    if (true_mdp.n_states() != construed_mdp.n_states() ||
        true_mdp.n_actions() != construed_mdp.n_actions())
        throw ValidationError("true and construed MDPs have different state/action spaces");
    const Policy construed_policy =
        soft_policy(soft_value_iteration(construed_mdp, beta, opts), construed_mdp, beta);
    const Policy true_policy = soft_policy(soft_value_iteration(true_mdp, beta, opts), true_mdp, beta);
    const double gap = empirical_gap(true_mdp, construed_policy, true_policy);
    return make_report(reward_magnitude(true_mdp), true_mdp.discount(),
                       dynamics_l1_gap(true_mdp.dynamics(), construed_mdp.dynamics()), gap);
}

} // namespace construal
