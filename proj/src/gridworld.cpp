#include "construal/gridworld.hpp"

#include "construal/errors.hpp"

#include <deque>
#include <fstream>
#include <sstream>

namespace construal {

namespace {

bool is_block_cell(Cell c) { return c == Cell::Block || c == Cell::Notch; }

bool is_known_cell(char ch) {
    switch (ch) {
    case '.': case '#': case 'n': case 'S': case 'P': case 'Y':
        return true;
    default:
        return false;
    }
}

struct Layout {
    std::vector<Coord> blocks;
    std::optional<Coord> bad_cell;
};

// Greedy row-major tiling: the first uncovered block cell must be the top-left
// corner of a fresh 3x3 region of block cells.
Layout tile_blocks(int width, int height, const std::vector<Cell>& cells) {
    Layout out;
    std::vector<bool> covered(cells.size(), false);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            const int idx = r * width + c;
            if (!is_block_cell(cells[idx]) || covered[idx])
                continue;
            if (r + 3 > height || c + 3 > width) {
                out.bad_cell = Coord{r, c};
                return out;
            }
            for (int dr = 0; dr < 3; ++dr) {
                for (int dc = 0; dc < 3; ++dc) {
                    const int j = (r + dr) * width + (c + dc);
                    if (!is_block_cell(cells[j]) || covered[j]) {
                        out.bad_cell = Coord{r, c};
                        return out;
                    }
                    covered[j] = true;
                }
            }
            out.blocks.push_back({r, c});
        }
    }
    return out;
}

Coord offset(Coord c, Move m) {
    switch (m) {
    case Move::Up: return {c.row - 1, c.col};
    case Move::Down: return {c.row + 1, c.col};
    case Move::Left: return {c.row, c.col - 1};
    case Move::Right: return {c.row, c.col + 1};
    }
    return c;
}

} // namespace

const char* goal_name(Goal g) { return g == Goal::Pink ? "pink" : "yellow"; }

const char* move_name(Move m) {
    switch (m) {
    case Move::Up: return "up";
    case Move::Down: return "down";
    case Move::Left: return "left";
    case Move::Right: return "right";
    }
    return "?";
}

GridSpec::GridSpec(int width, int height, std::vector<Cell> cells)
    : width_(width), height_(height), cells_(std::move(cells)) {
    if (width_ <= 0 || height_ <= 0)
        throw ValidationError("grid dimensions must be positive");
    if (cells_.size() != static_cast<std::size_t>(width_) * height_)
        throw ValidationError("cell count does not match grid dimensions");
    int starts = 0, pinks = 0, yellows = 0;
    for (int i = 0; i < n_cells(); ++i) {
        switch (cells_[i]) {
        case Cell::Start: ++starts; start_ = coord(i); break;
        case Cell::GoalPink: ++pinks; pink_ = coord(i); break;
        case Cell::GoalYellow: ++yellows; yellow_ = coord(i); break;
        case Cell::Open: case Cell::Block: case Cell::Notch: break;
        default: throw ValidationError("unknown cell kind");
        }
    }
    if (starts != 1 || pinks != 1 || yellows != 1)
        throw ValidationError("grid needs exactly one start, one pink goal and one yellow goal");
    Layout layout = tile_blocks(width_, height_, cells_);
    if (layout.bad_cell)
        throw ValidationError("block cell at (" + std::to_string(layout.bad_cell->row) + ", " +
                              std::to_string(layout.bad_cell->col) +
                              ") is not part of a 3x3 block");
    blocks_ = std::move(layout.blocks);
}

std::vector<Coord> GridSpec::notches() const {
    std::vector<Coord> out;
    for (int i = 0; i < n_cells(); ++i)
        if (cells_[i] == Cell::Notch)
            out.push_back(coord(i));
    return out;
}

GridSpec parse_grid(std::string_view text) {
    std::vector<std::string> lines;
    {
        std::string line;
        std::istringstream in{std::string(text)};
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            lines.push_back(line);
        }
    }
    while (!lines.empty() && lines.back().empty())
        lines.pop_back();
    if (lines.empty())
        throw ParseError("empty grid text", 1, 1);

    std::istringstream header(lines[0]);
    std::string magic, version;
    int width = 0, height = 0;
    std::string trailing;
    if (!(header >> magic >> version >> width >> height) || magic != "grid" || version != "v1" ||
        (header >> trailing))
        throw ParseError("expected header 'grid v1 <width> <height>'", 1, 1);
    if (width <= 0 || height <= 0)
        throw ParseError("grid dimensions must be positive", 1, 1);
    if (static_cast<int>(lines.size()) - 1 != height)
        throw ParseError("expected " + std::to_string(height) + " rows, found " +
                             std::to_string(lines.size() - 1),
                         static_cast<int>(lines.size()), 1);

    std::vector<Cell> cells;
    cells.reserve(static_cast<std::size_t>(width) * height);
    std::optional<Coord> start, pink, yellow;
    for (int r = 0; r < height; ++r) {
        const std::string& row = lines[r + 1];
        const int line_no = r + 2;
        if (static_cast<int>(row.size()) != width)
            throw ParseError("row has " + std::to_string(row.size()) + " cells, expected " +
                                 std::to_string(width),
                             line_no, std::min<int>(static_cast<int>(row.size()), width) + 1);
        for (int c = 0; c < width; ++c) {
            const char ch = row[c];
            if (!is_known_cell(ch))
                throw ParseError(std::string("unknown cell character '") + ch + "'", line_no, c + 1);
            auto claim = [&](std::optional<Coord>& slot, const char* what) {
                if (slot)
                    throw ParseError(std::string("duplicate ") + what, line_no, c + 1);
                slot = Coord{r, c};
            };
            if (ch == 'S') claim(start, "start");
            if (ch == 'P') claim(pink, "pink goal");
            if (ch == 'Y') claim(yellow, "yellow goal");
            cells.push_back(static_cast<Cell>(ch));
        }
    }
    if (!start) throw ParseError("missing start 'S'", 0, 0);
    if (!pink) throw ParseError("missing pink goal 'P'", 0, 0);
    if (!yellow) throw ParseError("missing yellow goal 'Y'", 0, 0);

    Layout layout = tile_blocks(width, height, cells);
    if (layout.bad_cell)
        throw ParseError("block cell is not part of a 3x3 block", layout.bad_cell->row + 2,
                         layout.bad_cell->col + 1);
    return GridSpec(width, height, std::move(cells));
}

std::string serialize_grid(const GridSpec& grid) {
    std::string out = "grid v1 " + std::to_string(grid.width()) + " " +
                      std::to_string(grid.height()) + "\n";
    for (int r = 0; r < grid.height(); ++r) {
        for (int c = 0; c < grid.width(); ++c)
            out.push_back(static_cast<char>(grid.at(Coord{r, c})));
        out.push_back('\n');
    }
    return out;
}

GridSpec load_grid(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open grid file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_grid(buf.str());
}

Construal::Construal(std::map<std::string, bool> feature_awareness)
    : awareness_(std::move(feature_awareness)) {
    for (const auto& [name, flag] : awareness_) {
        (void)flag;
        bool known = false;
        for (const auto& k : known_features())
            known = known || k == name;
        if (!known)
            throw ValidationError("unknown construal feature class '" + name + "'");
    }
    for (const auto& k : known_features())
        awareness_.try_emplace(k, true);
}

const std::vector<std::string>& Construal::known_features() {
    static const std::vector<std::string> features{"notch"};
    return features;
}

Construal Construal::full() { return Construal({{"notch", true}}); }
Construal Construal::notch_unaware() { return Construal({{"notch", false}}); }

bool Construal::aware_of(const std::string& feature) const {
    auto it = awareness_.find(feature);
    if (it == awareness_.end())
        throw ValidationError("unknown construal feature class '" + feature + "'");
    return it->second;
}

std::string Construal::name() const { return notch_aware() ? "notch_aware" : "notch_unaware"; }

std::string RewardHypothesis::name() const {
    return std::string(goal_name(preferred())) + "_preferred";
}

void RewardHypothesis::validate() const {
    if (pink == yellow)
        throw ValidationError("reward hypothesis must strictly prefer one goal");
    if (step_reward > 0.0)
        throw ValidationError("step_reward must be <= 0");
}

RewardHypothesis RewardHypothesis::preferring(Goal g, double preferred, double other,
                                              double step_reward) {
    RewardHypothesis h;
    h.pink = g == Goal::Pink ? preferred : other;
    h.yellow = g == Goal::Pink ? other : preferred;
    h.step_reward = step_reward;
    h.validate();
    return h;
}

std::vector<bool> apply_construal(const GridSpec& grid, const Construal& construal) {
    std::vector<bool> passable(grid.n_cells());
    const bool notch_ok = construal.notch_aware();
    for (int i = 0; i < grid.n_cells(); ++i) {
        const Cell c = grid.at(i);
        passable[i] = c == Cell::Notch ? notch_ok : c != Cell::Block;
    }
    return passable;
}

int step_cell(const GridSpec& grid, const std::vector<bool>& passable, int state, Move move) {
    const Coord next = offset(grid.coord(state), move);
    if (!grid.contains(next))
        return state;
    const int idx = grid.index(next);
    return passable[idx] ? idx : state;
}

std::optional<int> path_length(const GridSpec& grid, const Construal& construal, Coord from,
                               Coord to) {
    const auto passable = apply_construal(grid, construal);
    std::vector<int> dist(grid.n_cells(), -1);
    std::deque<int> queue{grid.index(from)};
    dist[grid.index(from)] = 0;
    while (!queue.empty()) {
        const int s = queue.front();
        queue.pop_front();
        if (s == grid.index(to))
            return dist[s];
        const Cell here = grid.at(s);
        if (s != grid.index(from) && (here == Cell::GoalPink || here == Cell::GoalYellow))
            continue; // goals absorb
        for (int m = 0; m < kNumMoves; ++m) {
            const int n = step_cell(grid, passable, s, static_cast<Move>(m));
            if (dist[n] < 0) {
                dist[n] = dist[s] + 1;
                queue.push_back(n);
            }
        }
    }
    return std::nullopt;
}

TabularMDP compile_mdp(const GridSpec& grid, const Construal& construal,
                       const RewardHypothesis& reward, double discount) {
    reward.validate();
    for (Goal g : {Goal::Pink, Goal::Yellow})
        if (!path_length(grid, Construal::full(), grid.start(), grid.goal(g)))
            throw ValidationError(std::string(goal_name(g)) +
                                  " goal is unreachable from the start under the full construal");

    const int n = grid.n_cells();
    const auto passable = apply_construal(grid, construal);
    std::vector<Matrix> dynamics(kNumMoves, Matrix::Zero(n, n));
    Matrix r = Matrix::Zero(n, kNumMoves);
    std::vector<int> terminal;
    for (int s = 0; s < n; ++s) {
        const Cell here = grid.at(s);
        const bool is_goal = here == Cell::GoalPink || here == Cell::GoalYellow;
        if (is_goal)
            terminal.push_back(s);
        for (int a = 0; a < kNumMoves; ++a) {
            if (is_goal) {
                dynamics[a](s, s) = 1.0;
                continue;
            }
            const int next = step_cell(grid, passable, s, static_cast<Move>(a));
            dynamics[a](s, next) = 1.0;
            const Cell there = grid.at(next);
            if (next != s && there == Cell::GoalPink)
                r(s, a) = reward.pink;
            else if (next != s && there == Cell::GoalYellow)
                r(s, a) = reward.yellow;
            else
                r(s, a) = reward.step_reward;
        }
    }
    Vector p0 = Vector::Zero(n);
    p0(grid.index(grid.start())) = 1.0;
    return TabularMDP(std::move(p0), std::move(dynamics), std::move(r), discount,
                      std::move(terminal));
}

} // namespace construal
