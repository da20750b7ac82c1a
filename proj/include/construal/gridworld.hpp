#pragma once

#include "construal/mdp.hpp"

#include <array>
#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace construal {

enum class Cell : char {
    Open = '.',
    Block = '#',
    Notch = 'n',
    Start = 'S',
    GoalPink = 'P',
    GoalYellow = 'Y',
};

enum class Goal { Pink, Yellow };

/// Cardinal moves. The action index of the compiled MDP is the enum value.
enum class Move { Up = 0, Down = 1, Left = 2, Right = 3 };
inline constexpr int kNumMoves = 4;

const char* goal_name(Goal g);
const char* move_name(Move m);

struct Coord {
    int row = 0;
    int col = 0;
    auto operator<=>(const Coord&) const = default;
};

/**
 * Blocks-and-notches maze.
 *
 * Every '#' or 'n' cell must belong to an axis-aligned 3x3 block made only of
 * '#' and 'n' cells; adjacent blocks may touch. There is exactly one start and
 * one goal of each colour.
 */
class GridSpec {
public:
    GridSpec(int width, int height, std::vector<Cell> cells);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int n_cells() const noexcept { return width_ * height_; }

    Cell at(Coord c) const { return cells_.at(index(c)); }
    Cell at(int state) const { return cells_.at(state); }
    const std::vector<Cell>& cells() const noexcept { return cells_; }

    Coord start() const noexcept { return start_; }
    Coord goal(Goal g) const noexcept { return g == Goal::Pink ? pink_ : yellow_; }
    /// Top-left corners of the 3x3 blocks, row-major.
    const std::vector<Coord>& blocks() const noexcept { return blocks_; }
    std::vector<Coord> notches() const;

    bool contains(Coord c) const noexcept {
        return c.row >= 0 && c.row < height_ && c.col >= 0 && c.col < width_;
    }
    int index(Coord c) const { return c.row * width_ + c.col; }
    Coord coord(int state) const { return {state / width_, state % width_}; }

    bool operator==(const GridSpec&) const = default;

private:
    int width_;
    int height_;
    std::vector<Cell> cells_;
    Coord start_{};
    Coord pink_{};
    Coord yellow_{};
    std::vector<Coord> blocks_;
};

/// Parses the `grid v1 <width> <height>` format. Throws ParseError.
GridSpec parse_grid(std::string_view text);
std::string serialize_grid(const GridSpec& grid);
GridSpec load_grid(const std::filesystem::path& path);

/// Awareness of the feature classes that can be dropped from a construal.
class Construal {
public:
    /// Throws ValidationError on an unknown feature class.
    explicit Construal(std::map<std::string, bool> feature_awareness);

    static Construal full();
    static Construal notch_unaware();

    bool notch_aware() const { return awareness_.at("notch"); }
    bool aware_of(const std::string& feature) const;
    const std::map<std::string, bool>& feature_awareness() const noexcept { return awareness_; }
    std::string name() const;

    static const std::vector<std::string>& known_features();

    bool operator==(const Construal&) const = default;

private:
    std::map<std::string, bool> awareness_;
};

struct RewardHypothesis {
    double pink = 1.0;
    double yellow = 0.5;
    double step_reward = -0.01;

    double goal_reward(Goal g) const { return g == Goal::Pink ? pink : yellow; }
    Goal preferred() const { return pink > yellow ? Goal::Pink : Goal::Yellow; }
    std::string name() const;
    /// Throws ValidationError unless the goal rewards differ and step_reward <= 0.
    void validate() const;

    static RewardHypothesis preferring(Goal g, double preferred = 1.0, double other = 0.5,
                                       double step_reward = -0.01);

    bool operator==(const RewardHypothesis&) const = default;
};

/// passable[state] for every cell under the construal.
std::vector<bool> apply_construal(const GridSpec& grid, const Construal& construal);

/// BFS distance (in moves) between two cells under a construal; empty when unreachable.
std::optional<int> path_length(const GridSpec& grid, const Construal& construal, Coord from, Coord to);

/**
 * States are the grid cells in row-major order; actions are the four moves.
 * Moves off-grid or into impassable cells leave the state unchanged. Entering
 * a goal pays that goal's reward; goals are absorbing. Every other transition
 * pays step_reward. P0 is a point mass on the start cell.
 *
 * Throws ValidationError when a goal cannot be reached from the start under
 * the full construal.
 */
TabularMDP compile_mdp(const GridSpec& grid, const Construal& construal,
                       const RewardHypothesis& reward, double discount);

/// Successor cell of a deterministic move under the given passability.
int step_cell(const GridSpec& grid, const std::vector<bool>& passable, int state, Move move);

} // namespace construal
