#include "lcrl/pacman.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <sstream>

namespace lcrl {

namespace {

// Chase tie-break order: up, down, left, right.
constexpr int kDx[4] = {0, 0, -1, 1};
constexpr int kDy[4] = {-1, 1, 0, 0};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

const std::vector<std::string>& PacmanEnv::action_names() const {
    static const std::vector<std::string> names{"left", "right", "up", "down"};
    return names;
}

// ---------------------------------------------------------------------------
// Fixture format

PacmanSpec parse_pacman(const std::string& text) {
    PacmanSpec spec;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    bool in_grid = false;
    bool have_pac = false, have_f1 = false, have_f2 = false;
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty()) continue;
        if (!in_grid) {
            const auto colon = line.find(':');
            if (colon == std::string::npos) throw FormatError(line_no, "expected 'key: value'");
            const std::string key = trim(line.substr(0, colon));
            const std::string rest = trim(line.substr(colon + 1));
            if (key == "pg") {
                try {
                    spec.pg = std::stod(rest);
                } catch (const std::exception&) {
                    throw FormatError(line_no, "bad pg value '" + rest + "'");
                }
                if (spec.pg < 0.0 || spec.pg > 1.0) throw FormatError(line_no, "pg must be in [0,1]");
            } else if (key == "grid") {
                in_grid = true;
            } else {
                throw FormatError(line_no, "unknown key '" + key + "'");
            }
            continue;
        }
        std::vector<std::string> tokens;
        std::istringstream toks(line);
        std::string t;
        while (toks >> t) tokens.push_back(t);
        if (!rows.empty() && tokens.size() != rows.front().size())
            throw FormatError(line_no, "ragged maze row");
        rows.push_back(std::move(tokens));
    }
    if (rows.empty()) throw FormatError(line_no, "missing maze body");

    spec.height = static_cast<int>(rows.size());
    spec.width = static_cast<int>(rows.front().size());
    spec.maze.assign(spec.width * spec.height, '.');
    for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
            const std::string& tok = rows[y][x];
            const int cell = y * spec.width + x;
            if (tok == "#") {
                spec.maze[cell] = '#';
            } else if (tok == ".") {
            } else if (tok == "P") {
                spec.pac_start = cell;
                have_pac = true;
            } else if (tok == "G") {
                spec.ghost_starts.push_back(cell);
            } else if (tok == "F1") {
                spec.food1 = cell;
                have_f1 = true;
            } else if (tok == "F2") {
                spec.food2 = cell;
                have_f2 = true;
            } else {
                throw FormatError(line_no, "unknown maze token '" + tok + "'");
            }
        }
    }
    if (!have_pac || !have_f1 || !have_f2 || spec.ghost_starts.empty())
        throw FormatError(line_no, "maze needs P, F1, F2 and at least one G");
    return spec;
}

std::string render_pacman(const PacmanSpec& spec) {
    std::ostringstream out;
    out << "pg: " << spec.pg << "\ngrid:\n";
    for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
            const int cell = y * spec.width + x;
            std::string tok = spec.maze[cell] == '#' ? "#" : ".";
            if (cell == spec.pac_start) tok = "P";
            if (cell == spec.food1) tok = "F1";
            if (cell == spec.food2) tok = "F2";
            if (std::find(spec.ghost_starts.begin(), spec.ghost_starts.end(), cell) !=
                spec.ghost_starts.end())
                tok = "G";
            out << (x ? " " : "") << tok;
        }
        out << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Environment

PacmanEnv::PacmanEnv(PacmanSpec spec) : spec_(std::move(spec)) {
    ap_ = {"f1", "f2", "g", "n"};
    corridor_index_.assign(spec_.width * spec_.height, -1);
    for (int cell = 0; cell < spec_.width * spec_.height; ++cell) {
        if (spec_.maze[cell] == '#') continue;
        corridor_index_[cell] = static_cast<int>(corridor_.size());
        corridor_.push_back(cell);
    }
    auto need_corridor = [&](int cell, const char* what) {
        if (corridor_index_[cell] < 0) throw Error(std::string(what) + " placed on a wall");
    };
    need_corridor(spec_.pac_start, "agent start");
    need_corridor(spec_.food1, "food 1");
    need_corridor(spec_.food2, "food 2");
    for (int g : spec_.ghost_starts) need_corridor(g, "ghost start");
    if (spec_.food1 == spec_.food2) throw Error("foods must occupy distinct cells");
}

int PacmanEnv::corridor_index(int cell) const { return corridor_index_[cell]; }

int PacmanEnv::num_states() const {
    std::int64_t n = static_cast<std::int64_t>(corridor_.size());
    for (std::size_t i = 0; i < spec_.ghost_starts.size(); ++i) n *= corridor_.size();
    n *= 4;
    if (n > 200000) throw TooLargeError("pacman state space too large");
    return static_cast<int>(n);
}

PacmanEnv::View PacmanEnv::decode(EnvState s) const {
    View v;
    std::int64_t rest = s;
    v.eaten2 = rest & 1;
    rest >>= 1;
    v.eaten1 = rest & 1;
    rest >>= 1;
    v.ghosts.resize(spec_.ghost_starts.size());
    for (std::size_t i = spec_.ghost_starts.size(); i-- > 0;) {
        v.ghosts[i] = static_cast<int>(rest % corridor_.size());
        rest /= corridor_.size();
    }
    v.pac = static_cast<int>(rest);
    return v;
}

EnvState PacmanEnv::encode(const View& v) const {
    std::int64_t s = v.pac;
    for (int g : v.ghosts) s = s * corridor_.size() + g;
    return (s << 2) | (static_cast<std::int64_t>(v.eaten1) << 1) |
           static_cast<std::int64_t>(v.eaten2);
}

EnvState PacmanEnv::reset() const {
    View v;
    v.pac = corridor_index_[spec_.pac_start];
    for (int g : spec_.ghost_starts) v.ghosts.push_back(corridor_index_[g]);
    v.eaten1 = v.eaten2 = false;
    return encode(v);
}

std::vector<int> PacmanEnv::legal_moves(int idx) const {
    const int cell = corridor_[idx];
    const int x = cell % spec_.width, y = cell / spec_.width;
    std::vector<int> out;
    for (int d = 0; d < 4; ++d) {
        const int nx = x + kDx[d], ny = y + kDy[d];
        if (nx < 0 || nx >= spec_.width || ny < 0 || ny >= spec_.height) continue;
        if (spec_.wall(nx, ny)) continue;
        out.push_back(corridor_index_[ny * spec_.width + nx]);
    }
    return out;
}

std::vector<ActionId> PacmanEnv::actions(EnvState s) const {
    const View v = decode(s);
    const int cell = corridor_[v.pac];
    const int x = cell % spec_.width, y = cell / spec_.width;
    std::vector<ActionId> out;
    // Action ids follow action_names(): left, right, up, down.
    const int adx[4] = {-1, 1, 0, 0};
    const int ady[4] = {0, 0, -1, 1};
    for (int a = 0; a < 4; ++a) {
        const int nx = x + adx[a], ny = y + ady[a];
        if (nx < 0 || nx >= spec_.width || ny < 0 || ny >= spec_.height) continue;
        if (spec_.wall(nx, ny)) continue;
        out.push_back(a);
    }
    return out;
}

int PacmanEnv::chase_move(int ghost_idx, int pac_idx) const {
    if (ghost_idx == pac_idx) return -1;
    // BFS distances from the target outward, then greedily descend from
    // the ghost; tie-break by the fixed direction order.
    std::vector<int> dist(corridor_.size(), -1);
    std::queue<int> q;
    dist[pac_idx] = 0;
    q.push(pac_idx);
    while (!q.empty()) {
        const int cur = q.front();
        q.pop();
        for (int nb : legal_moves(cur)) {
            if (dist[nb] == -1) {
                dist[nb] = dist[cur] + 1;
                q.push(nb);
            }
        }
    }
    const int cell = corridor_[ghost_idx];
    const int x = cell % spec_.width, y = cell / spec_.width;
    for (int d = 0; d < 4; ++d) {
        const int nx = x + kDx[d], ny = y + kDy[d];
        if (nx < 0 || nx >= spec_.width || ny < 0 || ny >= spec_.height) continue;
        if (spec_.wall(nx, ny)) continue;
        const int nb = corridor_index_[ny * spec_.width + nx];
        if (dist[nb] != -1 && dist[nb] == dist[ghost_idx] - 1) return nb;
    }
    return -1;  // unreachable target; treated as staying put
}

std::vector<std::pair<int, double>> PacmanEnv::ghost_row(int ghost_idx, int pac_idx) const {
    std::map<int, double> mass;
    const int chase = chase_move(ghost_idx, pac_idx);
    mass[chase >= 0 ? chase : ghost_idx] += spec_.pg;
    const auto moves = legal_moves(ghost_idx);
    if (moves.empty()) {
        mass[ghost_idx] += 1.0 - spec_.pg;
    } else {
        for (int nb : moves) mass[nb] += (1.0 - spec_.pg) / moves.size();
    }
    std::vector<std::pair<int, double>> row;
    for (const auto& [next, p] : mass)
        if (p > 0.0) row.emplace_back(next, p);
    return row;
}

EnvState PacmanEnv::step(EnvState s, ActionId a, std::mt19937_64& rng) const {
    const View v = decode(s);
    const auto avail = actions(s);
    if (std::find(avail.begin(), avail.end(), a) == avail.end())
        throw InvalidActionError("move into a wall");
    const int cell = corridor_[v.pac];
    const int x = cell % spec_.width, y = cell / spec_.width;
    const int adx[4] = {-1, 1, 0, 0};
    const int ady[4] = {0, 0, -1, 1};
    View next = v;
    next.pac = corridor_index_[(y + ady[a]) * spec_.width + (x + adx[a])];
    next.eaten1 = v.eaten1 || corridor_[v.pac] == spec_.food1;
    next.eaten2 = v.eaten2 || corridor_[v.pac] == spec_.food2;

    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (std::size_t i = 0; i < next.ghosts.size(); ++i) {
        if (coin(rng) < spec_.pg) {
            const int chase = chase_move(v.ghosts[i], v.pac);
            next.ghosts[i] = chase >= 0 ? chase : v.ghosts[i];
        } else {
            const auto moves = legal_moves(v.ghosts[i]);
            if (moves.empty()) continue;
            std::uniform_int_distribution<std::size_t> pick(0, moves.size() - 1);
            next.ghosts[i] = moves[pick(rng)];
        }
    }
    return encode(next);
}

std::vector<std::pair<EnvState, double>> PacmanEnv::transition_row(EnvState s, ActionId a) const {
    const View v = decode(s);
    const auto avail = actions(s);
    if (std::find(avail.begin(), avail.end(), a) == avail.end())
        throw InvalidActionError("move into a wall");
    const int cell = corridor_[v.pac];
    const int x = cell % spec_.width, y = cell / spec_.width;
    const int adx[4] = {-1, 1, 0, 0};
    const int ady[4] = {0, 0, -1, 1};
    View base = v;
    base.pac = corridor_index_[(y + ady[a]) * spec_.width + (x + adx[a])];
    base.eaten1 = v.eaten1 || corridor_[v.pac] == spec_.food1;
    base.eaten2 = v.eaten2 || corridor_[v.pac] == spec_.food2;

    // Product over the independent ghost distributions.
    std::map<EnvState, double> mass;
    std::vector<std::vector<std::pair<int, double>>> ghost_rows;
    for (std::size_t i = 0; i < v.ghosts.size(); ++i)
        ghost_rows.push_back(ghost_row(v.ghosts[i], v.pac));

    std::vector<std::size_t> pickv(v.ghosts.size(), 0);
    while (true) {
        View combo = base;
        double p = 1.0;
        for (std::size_t i = 0; i < pickv.size(); ++i) {
            combo.ghosts[i] = ghost_rows[i][pickv[i]].first;
            p *= ghost_rows[i][pickv[i]].second;
        }
        mass[encode(combo)] += p;
        std::size_t i = 0;
        for (; i < pickv.size(); ++i) {
            if (++pickv[i] < ghost_rows[i].size()) break;
            pickv[i] = 0;
        }
        if (i == pickv.size()) break;
    }
    return {mass.begin(), mass.end()};
}

std::uint32_t PacmanEnv::labels(EnvState s) const {
    const View v = decode(s);
    for (int g : v.ghosts)
        if (g == v.pac) return 1u << 2;  // g
    if (corridor_[v.pac] == spec_.food1 && !v.eaten1) return 1u << 0;  // f1
    if (corridor_[v.pac] == spec_.food2 && !v.eaten2) return 1u << 1;  // f2
    return 1u << 3;                                                    // n
}

bool PacmanEnv::both_foods_eaten(EnvState s) const {
    const View v = decode(s);
    const bool f1 = v.eaten1 || corridor_[v.pac] == spec_.food1;
    const bool f2 = v.eaten2 || corridor_[v.pac] == spec_.food2;
    return f1 && f2;
}

bool PacmanEnv::ghost_collision(EnvState s) const {
    const View v = decode(s);
    for (int g : v.ghosts)
        if (g == v.pac) return true;
    return false;
}

PacmanSpec pacman_small_spec() {
    return parse_pacman(
        "pg: 0.9\n"
        "grid:\n"
        "# # # # # # #\n"
        "# . . G . . #\n"
        "# . # # # . #\n"
        "# F1 . P . F2 #\n"
        "# # # # # # #\n");
}

}  // namespace lcrl
