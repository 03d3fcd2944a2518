#pragma once

#include <set>
#include <string>

#include "lcrl/env.hpp"

namespace lcrl {

// Slippery grid-world. Cells carry one label character each from
// {i,s,u,p,t,A,B,C,n}; '#' marks a blocked cell. An intended move succeeds
// with probability `slip`; the remaining mass lands uniformly on the cell
// itself and its in-grid von Neumann neighbours (moves into walls or off
// the grid resolve to staying). Cells whose label is in `absorbing` only
// offer `stay`, which is a deterministic self-loop.
struct GridSpec {
    int width = 0;
    int height = 0;
    std::vector<char> cells;  // row-major, top row first
    double slip = 0.85;
    std::set<char> absorbing;
    int start_x = 0;
    int start_y = 0;
    std::vector<ActionId> allowed_actions;  // subset of {left,right,up,down,stay}

    char at(int x, int y) const { return cells[y * width + x]; }
    bool blocked(int x, int y) const { return at(x, y) == '#'; }
};

inline constexpr ActionId kLeft = 0, kRight = 1, kUp = 2, kDown = 3, kStay = 4;
const std::vector<std::string>& grid_action_names();

// Text fixture format: "key: value" headers (slip, absorbing, start,
// actions), then "grid:" followed by one row per line.
GridSpec parse_grid(const std::string& text);
std::string render_grid(const GridSpec& spec);

class GridEnv : public LabeledEnv {
public:
    explicit GridEnv(GridSpec spec);

    EnvState reset() const override;
    std::vector<ActionId> actions(EnvState s) const override;
    EnvState step(EnvState s, ActionId a, std::mt19937_64& rng) const override;
    std::uint32_t labels(EnvState s) const override;
    const std::vector<std::string>& ap() const override { return ap_; }
    const std::vector<std::string>& action_names() const override { return grid_action_names(); }

    bool is_enumerable() const override { return true; }
    int num_states() const override { return spec_.width * spec_.height; }
    std::vector<std::pair<EnvState, double>> transition_row(EnvState s, ActionId a) const override;

    const GridSpec& spec() const { return spec_; }
    EnvState state_at(int x, int y) const { return y * spec_.width + x; }

private:
    int resolve(int x, int y, ActionId a) const;  // intended move, walls stay put
    std::vector<int> slip_slots(int s) const;     // self + in-grid neighbours
    bool is_absorbing(int s) const;

    GridSpec spec_;
    std::vector<std::string> ap_;
    std::vector<std::uint32_t> label_masks_;
};

// Bundled grid fixtures. The parameterised regions scale between 10 and 40
// cells a side, keeping the same label vocabulary and topology class.
GridSpec region3_spec();
GridSpec five_by_five_spec();
GridSpec region_spec(const std::string& name, int size);  // region1 | region2

}  // namespace lcrl
