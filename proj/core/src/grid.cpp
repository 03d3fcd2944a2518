#include "lcrl/grid.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace lcrl {

namespace {

constexpr const char* kVocabulary = "isuptABCn";

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

int vocab_rank(char c) {
    const std::string v = kVocabulary;
    const auto pos = v.find(c);
    return pos == std::string::npos ? 100 + c : static_cast<int>(pos);
}

}  // namespace

const std::vector<std::string>& grid_action_names() {
    static const std::vector<std::string> names{"left", "right", "up", "down", "stay"};
    return names;
}

// ---------------------------------------------------------------------------
// Fixture file format

GridSpec parse_grid(const std::string& text) {
    GridSpec spec;
    spec.allowed_actions = {kLeft, kRight, kUp, kDown, kStay};
    bool in_grid = false, have_start = false;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    std::vector<std::string> rows;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty()) continue;
        // A blocked row may begin with '#', so comments only exist in the
        // header section.
        if (!in_grid && line[0] == '#') continue;
        if (!in_grid) {
            const auto colon = line.find(':');
            if (colon == std::string::npos) throw FormatError(line_no, "expected 'key: value'");
            const std::string key = trim(line.substr(0, colon));
            const std::string rest = trim(line.substr(colon + 1));
            if (key == "slip") {
                try {
                    spec.slip = std::stod(rest);
                } catch (const std::exception&) {
                    throw FormatError(line_no, "bad slip value '" + rest + "'");
                }
                if (spec.slip < 0.0 || spec.slip > 1.0)
                    throw FormatError(line_no, "slip must be in [0,1]");
            } else if (key == "absorbing") {
                std::istringstream labels(rest);
                std::string l;
                while (labels >> l) {
                    if (l.size() != 1)
                        throw FormatError(line_no, "absorbing labels are single chars");
                    spec.absorbing.insert(l[0]);
                }
            } else if (key == "start") {
                if (std::sscanf(rest.c_str(), "%d,%d", &spec.start_x, &spec.start_y) != 2)
                    throw FormatError(line_no, "expected 'start: x,y'");
                have_start = true;
            } else if (key == "actions") {
                spec.allowed_actions.clear();
                std::istringstream names(rest);
                std::string name;
                while (names >> name) {
                    const auto& all = grid_action_names();
                    const auto it = std::find(all.begin(), all.end(), name);
                    if (it == all.end())
                        throw FormatError(line_no, "unknown action '" + name + "'");
                    spec.allowed_actions.push_back(static_cast<ActionId>(it - all.begin()));
                }
            } else if (key == "grid") {
                in_grid = true;
            } else {
                throw FormatError(line_no, "unknown key '" + key + "'");
            }
            continue;
        }
        rows.push_back(line);
        for (char c : line)
            if (c != '#' && std::string(kVocabulary).find(c) == std::string::npos)
                throw FormatError(line_no, std::string("unknown cell '") + c + "'");
        if (line.size() != rows.front().size()) throw FormatError(line_no, "ragged grid row");
    }
    if (rows.empty()) throw FormatError(line_no, "missing grid body");

    spec.height = static_cast<int>(rows.size());
    spec.width = static_cast<int>(rows.front().size());
    spec.cells.reserve(spec.width * spec.height);
    for (const auto& row : rows) spec.cells.insert(spec.cells.end(), row.begin(), row.end());

    if (!have_start) {
        int count = 0;
        for (int y = 0; y < spec.height; ++y)
            for (int x = 0; x < spec.width; ++x)
                if (spec.at(x, y) == 'i') {
                    spec.start_x = x;
                    spec.start_y = y;
                    ++count;
                }
        if (count != 1)
            throw FormatError(line_no, "need exactly one 'i' cell or an explicit start header");
    }
    if (spec.start_x < 0 || spec.start_x >= spec.width || spec.start_y < 0 ||
        spec.start_y >= spec.height || spec.blocked(spec.start_x, spec.start_y))
        throw FormatError(line_no, "start cell outside the grid or blocked");
    if (spec.allowed_actions.empty()) throw FormatError(line_no, "empty action set");
    return spec;
}

std::string render_grid(const GridSpec& spec) {
    std::ostringstream out;
    out << "slip: " << spec.slip << "\nabsorbing:";
    for (char c : spec.absorbing) out << ' ' << c;
    out << "\nstart: " << spec.start_x << ',' << spec.start_y << "\nactions:";
    for (ActionId a : spec.allowed_actions) out << ' ' << grid_action_names()[a];
    out << "\ngrid:\n";
    for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) out << spec.at(x, y);
        out << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Environment

GridEnv::GridEnv(GridSpec spec) : spec_(std::move(spec)) {
    std::set<char> chars;
    for (char c : spec_.cells)
        if (c != '#') chars.insert(c);
    std::vector<char> ordered(chars.begin(), chars.end());
    std::sort(ordered.begin(), ordered.end(),
              [](char a, char b) { return vocab_rank(a) < vocab_rank(b); });
    for (char c : ordered) ap_.emplace_back(1, c);

    label_masks_.resize(spec_.cells.size(), 0);
    for (std::size_t s = 0; s < spec_.cells.size(); ++s) {
        const char c = spec_.cells[s];
        if (c == '#') continue;
        const auto it = std::find(ordered.begin(), ordered.end(), c);
        label_masks_[s] = 1u << (it - ordered.begin());
    }
}

EnvState GridEnv::reset() const { return state_at(spec_.start_x, spec_.start_y); }

bool GridEnv::is_absorbing(int s) const { return spec_.absorbing.count(spec_.cells[s]) != 0; }

std::vector<ActionId> GridEnv::actions(EnvState s) const {
    const int idx = static_cast<int>(s);
    if (spec_.cells[idx] == '#' || is_absorbing(idx)) return {kStay};
    return spec_.allowed_actions;
}

int GridEnv::resolve(int x, int y, ActionId a) const {
    int nx = x, ny = y;
    switch (a) {
        case kLeft: nx = x - 1; break;
        case kRight: nx = x + 1; break;
        case kUp: ny = y - 1; break;
        case kDown: ny = y + 1; break;
        case kStay: break;
        default: throw InvalidActionError("unknown grid action " + std::to_string(a));
    }
    if (nx < 0 || nx >= spec_.width || ny < 0 || ny >= spec_.height || spec_.blocked(nx, ny))
        return y * spec_.width + x;
    return ny * spec_.width + nx;
}

std::vector<int> GridEnv::slip_slots(int s) const {
    const int x = s % spec_.width, y = s / spec_.width;
    std::vector<int> slots{s};
    if (x > 0) slots.push_back(s - 1);
    if (x + 1 < spec_.width) slots.push_back(s + 1);
    if (y > 0) slots.push_back(s - spec_.width);
    if (y + 1 < spec_.height) slots.push_back(s + spec_.width);
    return slots;
}

EnvState GridEnv::step(EnvState s, ActionId a, std::mt19937_64& rng) const {
    const int idx = static_cast<int>(s);
    const auto avail = actions(s);
    if (std::find(avail.begin(), avail.end(), a) == avail.end())
        throw InvalidActionError("action '" + grid_action_names()[a] + "' not available here");
    if (is_absorbing(idx) || spec_.cells[idx] == '#') return s;

    const int x = idx % spec_.width, y = idx / spec_.width;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < spec_.slip) return resolve(x, y, a);
    const auto slots = slip_slots(idx);
    std::uniform_int_distribution<std::size_t> pick(0, slots.size() - 1);
    const int slot = slots[pick(rng)];
    return spec_.cells[slot] == '#' ? s : slot;
}

std::vector<std::pair<EnvState, double>> GridEnv::transition_row(EnvState s, ActionId a) const {
    const int idx = static_cast<int>(s);
    const auto avail = actions(s);
    if (std::find(avail.begin(), avail.end(), a) == avail.end())
        throw InvalidActionError("action '" + grid_action_names()[a] + "' not available here");
    std::map<int, double> mass;
    if (is_absorbing(idx) || spec_.cells[idx] == '#') {
        mass[idx] = 1.0;
    } else {
        const int x = idx % spec_.width, y = idx / spec_.width;
        mass[resolve(x, y, a)] += spec_.slip;
        const auto slots = slip_slots(idx);
        for (int slot : slots) {
            const int target = spec_.cells[slot] == '#' ? idx : slot;
            mass[target] += (1.0 - spec_.slip) / slots.size();
        }
    }
    std::vector<std::pair<EnvState, double>> row;
    for (const auto& [next, p] : mass)
        if (p > 0.0) row.emplace_back(next, p);
    return row;
}

std::uint32_t GridEnv::labels(EnvState s) const { return label_masks_[static_cast<int>(s)]; }

// ---------------------------------------------------------------------------
// Bundled fixtures

GridSpec region3_spec() {
    return parse_grid(
        "slip: 0.85\n"
        "absorbing: t u\n"
        "actions: left right stay\n"
        "grid:\n"
        "uuu\n"
        "uuu\n"
        "its\n");
}

GridSpec five_by_five_spec() {
    // Deterministic moves: recurrence between A and B while never touching
    // C is impossible under slip (every action's slip support covers all
    // neighbours, so any recurrent class swallows the whole component).
    return parse_grid(
        "slip: 1.0\n"
        "absorbing:\n"
        "start: 0,3\n"
        "grid:\n"
        "AAnnn\n"
        "nnnnn\n"
        "nnCnn\n"
        "nnnnB\n"
        "nnnBB\n");
}

GridSpec region_spec(const std::string& name, int size) {
    if (name == "region3") return region3_spec();
    if (name == "five_by_five") return five_by_five_spec();
    if (name != "region1" && name != "region2")
        throw UnknownNameError("unknown region fixture '" + name + "'");
    if (size < 10 || size > 40) throw ConfigError("size", "region size must be between 10 and 40");

    const int L = size;
    std::vector<std::string> rows(L, std::string(L, 's'));
    auto paint = [&](int x0, int x1, int y0, int y1, char c) {
        for (int y = std::max(0, y0); y < std::min(L, y1); ++y)
            for (int x = std::max(0, x0); x < std::min(L, x1); ++x) rows[y][x] = c;
    };

    if (name == "region1") {
        // Two staggered vertical walls forcing an S-shaped route to the
        // pre-target block and then the target.
        const int w = std::max(1, L / 20);
        paint(L / 4, L / 4 + w, 0, 7 * L / 10, 'u');
        paint(6 * L / 10, 6 * L / 10 + w, 3 * L / 10, L, 'u');
        paint(L / 2, L / 2 + std::max(1, 3 * L / 20), L / 2, L / 2 + std::max(1, 3 * L / 20),
              'p');
        paint(17 * L / 20, 17 * L / 20 + std::max(1, L / 10), L / 20, L / 20 + std::max(1, L / 10),
              't');
    } else {
        // One horizontal wall with a wide gap on the right.
        const int h = std::max(1, L / 10);
        paint(0, 13 * L / 20, 9 * L / 20, 9 * L / 20 + h, 'u');
        paint(7 * L / 10, 9 * L / 10, 7 * L / 10, 7 * L / 10 + std::max(1, 3 * L / 20), 'p');
        paint(4 * L / 5, 4 * L / 5 + std::max(1, L / 10), L / 10, L / 10 + std::max(1, L / 10),
              't');
    }
    rows[L - 1][0] = 'i';

    std::ostringstream text;
    text << "slip: 0.85\nabsorbing: t u\ngrid:\n";
    for (const auto& r : rows) text << r << '\n';
    return parse_grid(text.str());
}

}  // namespace lcrl
