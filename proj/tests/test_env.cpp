#include <doctest.h>

#include <bit>
#include <functional>
#include <map>
#include <random>

#include "lcrl/grid.hpp"
#include "lcrl/pacman.hpp"

using namespace lcrl;

namespace {

std::uint32_t label_bit(const LabeledEnv& env, const std::string& name) {
    const auto& ap = env.ap();
    const auto it = std::find(ap.begin(), ap.end(), name);
    REQUIRE(it != ap.end());
    return 1u << (it - ap.begin());
}

}  // namespace

TEST_CASE("grid_step: deterministic limit and absorbing stay") {
    GridSpec spec = region3_spec();
    spec.slip = 1.0;
    GridEnv env(spec);
    std::mt19937_64 rng(1);
    const EnvState origin = env.state_at(0, 2);
    CHECK(env.step(origin, kRight, rng) == env.state_at(1, 2));
    CHECK(env.step(origin, kLeft, rng) == origin);  // off-grid resolves to staying

    GridEnv slippery(region3_spec());
    const EnvState target = slippery.state_at(1, 2);
    CHECK(slippery.labels(target) == label_bit(slippery, "t"));
    CHECK(slippery.actions(target) == std::vector<ActionId>{kStay});
    for (int i = 0; i < 50; ++i) CHECK(slippery.step(target, kStay, rng) == target);
    CHECK_THROWS_AS(slippery.step(target, kUp, rng), InvalidActionError);
}

TEST_CASE("grid_step: slip law matches the closed form empirically") {
    // 3x3 around a free centre cell: intended mass plus a fifth of the slip
    // mass stays on the intended neighbour.
    GridSpec spec = parse_grid(
        "slip: 0.85\n"
        "absorbing:\n"
        "start: 1,1\n"
        "grid:\n"
        "sss\n"
        "sss\n"
        "sss\n");
    GridEnv env(spec);
    std::mt19937_64 rng(42);
    const EnvState centre = env.state_at(1, 1);
    const EnvState up = env.state_at(1, 0);
    int hits = 0;
    const int samples = 100000;
    for (int i = 0; i < samples; ++i)
        if (env.step(centre, kUp, rng) == up) ++hits;
    const double expected = 0.85 + 0.15 / 5.0;
    CHECK(static_cast<double>(hits) / samples == doctest::Approx(expected).epsilon(0.012));

    const auto row = env.transition_row(centre, kUp);
    double total = 0.0;
    for (const auto& [next, p] : row) {
        total += p;
        if (next == up) CHECK(p == doctest::Approx(expected));
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("region3 fixture") {
    GridEnv env(region3_spec());
    CHECK(env.num_states() == 9);
    CHECK(env.labels(env.state_at(1, 0)) == label_bit(env, "u"));
    CHECK(env.labels(env.state_at(1, 2)) == label_bit(env, "t"));
    CHECK(env.reset() == env.state_at(0, 2));
    // Trap cells only offer stay.
    CHECK(env.actions(env.state_at(0, 0)) == std::vector<ActionId>{kStay});
    // The fixture file disables the vertical moves.
    CHECK(env.actions(env.reset()) == std::vector<ActionId>{kLeft, kRight, kStay});
}

TEST_CASE("region fixtures scale while keeping their vocabulary") {
    for (const std::string name : {"region1", "region2"}) {
        CAPTURE(name);
        GridEnv big(region_spec(name, 40));
        CHECK(big.num_states() == 1600);
        GridEnv small(region_spec(name, 10));
        CHECK(small.num_states() == 100);
        for (const auto& env : {std::cref(big), std::cref(small)}) {
            const auto& ap = env.get().ap();
            for (const std::string required : {"i", "s", "u", "p", "t"})
                CHECK(std::find(ap.begin(), ap.end(), required) != ap.end());
        }
    }
    CHECK_THROWS_AS(region_spec("region9", 10), UnknownNameError);
    CHECK_THROWS_AS(region_spec("region1", 5), ConfigError);
}

TEST_CASE("five_by_five fixture") {
    GridEnv env(five_by_five_spec());
    CHECK(env.num_states() == 25);
    CHECK(env.reset() == env.state_at(0, 3));
    CHECK(env.labels(env.state_at(0, 0)) == label_bit(env, "A"));
    CHECK(env.labels(env.state_at(4, 4)) == label_bit(env, "B"));
    CHECK(env.labels(env.state_at(2, 2)) == label_bit(env, "C"));
    // Every cell carries exactly one label.
    for (int s = 0; s < env.num_states(); ++s) CHECK(std::popcount(env.labels(s)) == 1);
}

TEST_CASE("grid fixture files round-trip") {
    const GridSpec spec = region_spec("region2", 12);
    const GridSpec back = parse_grid(render_grid(spec));
    CHECK(back.cells == spec.cells);
    CHECK(back.slip == spec.slip);
    CHECK(back.absorbing == spec.absorbing);
    CHECK(back.start_x == spec.start_x);
    CHECK(back.start_y == spec.start_y);

    CHECK_THROWS_AS(parse_grid("slip: 2.0\ngrid:\nss\nss\n"), FormatError);
    CHECK_THROWS_AS(parse_grid("grid:\nsz\n"), FormatError);
    CHECK_THROWS_AS(parse_grid("grid:\nss\nsss\n"), FormatError);
    CHECK_THROWS_AS(parse_grid("grid:\nss\nss\n"), FormatError);  // no start anywhere
}

TEST_CASE("explicit_mdp: rows are distributions matching the sampler") {
    GridEnv env(region3_spec());
    const ExplicitMdp mdp = explicit_mdp(env);
    REQUIRE(mdp.n_states == 9);
    for (int s = 0; s < mdp.n_states; ++s) {
        for (std::size_t ai = 0; ai < mdp.actions[s].size(); ++ai) {
            double total = 0.0;
            for (const auto& [next, p] : mdp.rows[s][ai]) {
                CHECK(p >= 0.0);
                total += p;
            }
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        }
    }

    // P(centre, up, top-centre) = slip + slip-mass/5 on an open grid.
    GridEnv open_grid(parse_grid(
        "slip: 0.85\nabsorbing:\nstart: 1,1\ngrid:\nsss\nsss\nsss\n"));
    const ExplicitMdp open_mdp = explicit_mdp(open_grid);
    const int centre = static_cast<int>(open_grid.state_at(1, 1));
    const int top_centre = static_cast<int>(open_grid.state_at(1, 0));
    for (const auto& [next, p] : open_mdp.row(centre, kUp))
        if (next == top_centre) CHECK(p == doctest::Approx(0.85 + 0.15 / 5.0));

    // Total-variation agreement between sampling and the table.
    std::mt19937_64 rng(7);
    std::map<EnvState, int> hist;
    const int samples = 100000;
    for (int i = 0; i < samples; ++i) ++hist[open_grid.step(centre, kDown, rng)];
    double tv = 0.0;
    for (const auto& [next, p] : open_mdp.row(centre, kDown)) {
        const auto it = hist.find(next);
        const double freq = it == hist.end() ? 0.0 : static_cast<double>(it->second) / samples;
        tv += std::abs(freq - p);
    }
    CHECK(tv / 2.0 < 0.02);
}

TEST_CASE("explicit_mdp: deterministic grid rows are unit vectors") {
    GridSpec spec = region3_spec();
    spec.slip = 1.0;
    GridEnv env(spec);
    const ExplicitMdp mdp = explicit_mdp(env);
    for (int s = 0; s < mdp.n_states; ++s)
        for (const auto& row : mdp.rows[s]) {
            CHECK(row.size() == 1);
            CHECK(row.front().second == doctest::Approx(1.0));
        }
}

TEST_CASE("seed determinism: identical trajectories") {
    GridEnv env(region_spec("region2", 10));
    for (int trial = 0; trial < 3; ++trial) {
        std::mt19937_64 a(99), b(99);
        EnvState sa = env.reset(), sb = env.reset();
        for (int i = 0; i < 200; ++i) {
            sa = env.step(sa, kRight, a);
            sb = env.step(sb, kRight, b);
            REQUIRE(sa == sb);
            if (env.actions(sa) == std::vector<ActionId>{kStay}) break;
        }
    }
}

TEST_CASE("pacman: fixture and label rules") {
    PacmanEnv env(pacman_small_spec());
    CHECK(env.num_states() == 12 * 12 * 4);
    const EnvState start = env.reset();
    CHECK(env.labels(start) == (1u << 3));  // n

    // Place the agent on a ghost: the crash tag wins.
    auto v = env.decode(start);
    v.pac = v.ghosts.front();
    CHECK(env.labels(env.encode(v)) == (1u << 2));

    // Fresh food tag only before the flag is set.
    auto w = env.decode(start);
    w.pac = env.corridor_index(env.spec().food1);
    CHECK(env.labels(env.encode(w)) == (1u << 0));
    w.eaten1 = true;
    CHECK(env.labels(env.encode(w)) == (1u << 3));
}

TEST_CASE("pacman: scatter-only ghosts move uniformly") {
    PacmanSpec spec = pacman_small_spec();
    spec.pg = 0.0;
    PacmanEnv env(spec);
    const EnvState start = env.reset();
    const auto view = env.decode(start);
    const auto moves = env.legal_moves(view.ghosts.front());
    REQUIRE(moves.size() == 2);  // corridor cell
    std::map<int, int> hist;
    std::mt19937_64 rng(5);
    const int samples = 20000;
    for (int i = 0; i < samples; ++i) {
        const EnvState next = env.step(start, env.actions(start).front(), rng);
        ++hist[env.decode(next).ghosts.front()];
    }
    for (int m : moves)
        CHECK(static_cast<double>(hist[m]) / samples == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("pacman: the chase move strictly approaches the agent") {
    PacmanEnv env(pacman_small_spec());
    auto bfs_dist = [&](int from, int to) {
        int d = 0;
        int cur = from;
        while (cur != to) {
            cur = env.chase_move(cur, to);
            REQUIRE(cur >= 0);
            ++d;
            REQUIRE(d < 100);
        }
        return d;
    };
    const int cells = 12;
    for (int g = 0; g < cells; ++g)
        for (int pac = 0; pac < cells; ++pac) {
            if (g == pac) {
                CHECK(env.chase_move(g, pac) == -1);
                continue;
            }
            const int step = env.chase_move(g, pac);
            REQUIRE(step >= 0);
            CHECK(bfs_dist(step, pac) == bfs_dist(g, pac) - 1);
        }
}

TEST_CASE("pacman: explicit rows match the sampler") {
    PacmanEnv env(pacman_small_spec());
    const ExplicitMdp mdp = explicit_mdp(env);
    CHECK(mdp.n_states == env.num_states());
    const int start = static_cast<int>(env.reset());
    const auto actions = env.actions(start);
    for (ActionId a : actions) {
        double total = 0.0;
        for (const auto& [next, p] : mdp.row(start, a)) total += p;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
    std::mt19937_64 rng(3);
    std::map<EnvState, int> hist;
    const int samples = 100000;
    for (int i = 0; i < samples; ++i) ++hist[env.step(start, actions.front(), rng)];
    double tv = 0.0;
    for (const auto& [next, p] : mdp.row(start, actions.front())) {
        const auto it = hist.find(next);
        const double freq = it == hist.end() ? 0.0 : static_cast<double>(it->second) / samples;
        tv += std::abs(freq - p);
    }
    CHECK(tv / 2.0 < 0.02);
}

TEST_CASE("pacman fixture file round-trips") {
    const PacmanSpec spec = pacman_small_spec();
    const PacmanSpec back = parse_pacman(render_pacman(spec));
    CHECK(back.maze == spec.maze);
    CHECK(back.pac_start == spec.pac_start);
    CHECK(back.ghost_starts == spec.ghost_starts);
    CHECK(back.food1 == spec.food1);
    CHECK(back.food2 == spec.food2);
    CHECK(back.pg == spec.pg);

    CHECK_THROWS_AS(parse_pacman("pg: 0.5\ngrid:\n# # #\n# . #\n# # #\n"), FormatError);
}
