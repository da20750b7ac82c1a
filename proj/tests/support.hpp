#pragma once
// Random instance generators shared by the unit and acceptance tests.

#include "construal/demonstrator.hpp"
#include "construal/gridworld.hpp"
#include "construal/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace testing_support {

using namespace construal;

inline Vector random_simplex(std::mt19937_64& rng, int n, double sparsity = 0.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vector v(n);
    for (int i = 0; i < n; ++i)
        v(i) = u(rng) < sparsity ? 0.0 : -std::log(1.0 - u(rng));
    if (v.sum() == 0.0)
        v(std::uniform_int_distribution<int>(0, n - 1)(rng)) = 1.0;
    return v / v.sum();
}

/// Dense random MDP with optional absorbing last state.
inline TabularMDP random_mdp(std::mt19937_64& rng, int n_states, int n_actions, double gamma,
                             bool absorbing_last = false, double reward_scale = 1.0) {
    std::uniform_real_distribution<double> u(-reward_scale, reward_scale);
    std::vector<Matrix> dyn(n_actions, Matrix::Zero(n_states, n_states));
    Matrix reward(n_states, n_actions);
    std::vector<int> terminal;
    for (int a = 0; a < n_actions; ++a)
        for (int s = 0; s < n_states; ++s) {
            dyn[a].row(s) = random_simplex(rng, n_states, 0.3).transpose();
            reward(s, a) = u(rng);
        }
    if (absorbing_last) {
        const int t = n_states - 1;
        for (int a = 0; a < n_actions; ++a) {
            dyn[a].row(t).setZero();
            dyn[a](t, t) = 1.0;
            reward(t, a) = 0.0;
        }
        terminal.push_back(t);
    }
    return TabularMDP(random_simplex(rng, n_states), std::move(dyn), std::move(reward), gamma,
                      std::move(terminal));
}

/// Random deterministic MDP: every (s, a) has a single successor.
inline TabularMDP random_deterministic_mdp(std::mt19937_64& rng, int n_states, int n_actions,
                                           double gamma) {
    std::uniform_int_distribution<int> pick(0, n_states - 1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Matrix> dyn(n_actions, Matrix::Zero(n_states, n_states));
    Matrix reward(n_states, n_actions);
    for (int a = 0; a < n_actions; ++a)
        for (int s = 0; s < n_states; ++s) {
            dyn[a](s, pick(rng)) = 1.0;
            reward(s, a) = u(rng);
        }
    Vector p0 = Vector::Zero(n_states);
    p0(0) = 1.0;
    return TabularMDP(p0, std::move(dyn), std::move(reward), gamma);
}

inline Policy random_policy(std::mt19937_64& rng, int n_states, int n_actions) {
    Matrix p(n_states, n_actions);
    for (int s = 0; s < n_states; ++s)
        p.row(s) = random_simplex(rng, n_actions, 0.2).transpose();
    return Policy(p);
}

/// Same MDP with every dynamics row mixed towards a random row.
inline TabularMDP perturb(std::mt19937_64& rng, const TabularMDP& mdp, double strength) {
    std::vector<Matrix> dyn = mdp.dynamics();
    for (auto& t : dyn)
        for (int s = 0; s < mdp.n_states(); ++s) {
            if (mdp.is_terminal(s))
                continue;
            t.row(s) = (1.0 - strength) * t.row(s) +
                       strength * random_simplex(rng, mdp.n_states(), 0.5).transpose();
        }
    return TabularMDP(mdp.initial_dist(), std::move(dyn), mdp.reward(), mdp.discount(),
                      mdp.terminal_states());
}

/// Random open grid of the given size with S, P, Y at distinct random cells.
inline std::string random_open_grid(std::mt19937_64& rng, int w, int h) {
    std::vector<int> cells(w * h);
    for (int i = 0; i < w * h; ++i)
        cells[i] = i;
    std::shuffle(cells.begin(), cells.end(), rng);
    std::string rows(w * h, '.');
    rows[cells[0]] = 'S';
    rows[cells[1]] = 'P';
    rows[cells[2]] = 'Y';
    std::string text = "grid v1 " + std::to_string(w) + " " + std::to_string(h) + "\n";
    for (int r = 0; r < h; ++r)
        text += rows.substr(r * w, w) + "\n";
    return text;
}

/// Arbitrary state-action pairs (not necessarily dynamically consistent).
inline Trajectory random_pairs(std::mt19937_64& rng, int n_states, int n_actions, int length) {
    std::uniform_int_distribution<int> s(0, n_states - 1), a(0, n_actions - 1);
    Trajectory t;
    for (int i = 0; i < length; ++i)
        t.steps.push_back({s(rng), a(rng)});
    return t;
}

} // namespace testing_support
