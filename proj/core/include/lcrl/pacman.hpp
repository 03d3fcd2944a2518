#pragma once

#include <string>

#include "lcrl/env.hpp"

namespace lcrl {

// Mini pacman on a corridor maze. The agent and the ghosts move one cell
// per step; the agent's move is deterministic, each ghost independently
// chases (shortest path toward the agent, probability pg) or scatters
// (uniform legal move). A state is (agent cell, ghost cells, eaten flags).
// Labels: g when co-located with a ghost, f1/f2 on the first entry to an
// uneaten food cell, n otherwise (one tag per state, g wins).
struct PacmanSpec {
    int width = 0;
    int height = 0;
    std::vector<char> maze;  // '#' wall, '.' corridor, row-major
    int pac_start = 0;       // cell index
    std::vector<int> ghost_starts;
    int food1 = 0;
    int food2 = 0;
    double pg = 0.9;

    bool wall(int x, int y) const { return maze[y * width + x] == '#'; }
};

// Token grid format: rows of {#, ., F1, F2, P, G} plus a "pg:" header.
PacmanSpec parse_pacman(const std::string& text);
std::string render_pacman(const PacmanSpec& spec);

class PacmanEnv : public LabeledEnv {
public:
    explicit PacmanEnv(PacmanSpec spec);

    EnvState reset() const override;
    std::vector<ActionId> actions(EnvState s) const override;
    EnvState step(EnvState s, ActionId a, std::mt19937_64& rng) const override;
    std::uint32_t labels(EnvState s) const override;
    const std::vector<std::string>& ap() const override { return ap_; }
    const std::vector<std::string>& action_names() const override;

    bool is_enumerable() const override { return true; }
    int num_states() const override;
    std::vector<std::pair<EnvState, double>> transition_row(EnvState s, ActionId a) const override;

    const PacmanSpec& spec() const { return spec_; }

    // Decoded view of a state.
    struct View {
        int pac;                  // corridor index
        std::vector<int> ghosts;  // corridor indices
        bool eaten1;
        bool eaten2;
    };
    View decode(EnvState s) const;
    EnvState encode(const View& v) const;

    int corridor_cell(int idx) const { return corridor_[idx]; }   // grid cell
    int corridor_index(int cell) const;                           // inverse
    bool both_foods_eaten(EnvState s) const;
    bool ghost_collision(EnvState s) const;

    // First move of a shortest path from ghost toward target, ties broken
    // in the order up, down, left, right; -1 when already there.
    int chase_move(int ghost_idx, int pac_idx) const;
    std::vector<int> legal_moves(int idx) const;  // corridor neighbours

private:
    std::vector<std::pair<int, double>> ghost_row(int ghost_idx, int pac_idx) const;

    PacmanSpec spec_;
    std::vector<std::string> ap_;
    std::vector<int> corridor_;        // corridor cells in grid order
    std::vector<int> corridor_index_;  // grid cell -> corridor index or -1
};

PacmanSpec pacman_small_spec();

}  // namespace lcrl
