#pragma once

#include <memory>
#include <string>

#include "lcrl/learner.hpp"
#include "lcrl/oracle.hpp"
#include "lcrl/translate.hpp"

namespace lcrl {

// Flat key=value experiment description; command-line flags override file
// values. Exactly one of property / automaton / automaton_file selects the
// specification.
struct ExperimentConfig {
    std::string fixture = "region3";  // bundled name or a .grid/.pac path
    int size = 40;                    // region1/region2 scaling
    std::string property;             // surface LTL text
    std::string automaton;            // bundled automaton name
    std::string automaton_file;       // automaton text file

    LearnParams params;
    std::vector<std::uint64_t> seeds{1};
    std::string out_dir = "out";
    int eval_runs = 10000;
    int horizon = 300;
    double psp_tol = 1e-6;
    bool psp_trace = true;

    void validate() const;  // throws ConfigError
};

ExperimentConfig load_config_file(const std::string& path);
// Applies one "key = value" override; throws ConfigError on unknown keys.
void apply_config_entry(ExperimentConfig& config, const std::string& key,
                        const std::string& value);

struct FixtureBundle {
    std::unique_ptr<LabeledEnv> env;
    std::string name;  // canonical identity used by the compare pipeline
};
FixtureBundle make_fixture(const ExperimentConfig& config);

struct PropertyBundle {
    Ldba ldba;
    std::string text;  // canonical identity used by the compare pipeline
};
PropertyBundle make_property(const ExperimentConfig& config, const LabeledEnv& env);

// Parses a formula without a declared alphabet: atoms are collected from
// the text itself.
LtlPtr parse_ltl_loose(const std::string& text);

// Pipelines backing the CLI subcommands. Each writes its artifacts under
// the configured output directory and returns the path written.
std::string run_train(const ExperimentConfig& config);    // per-seed directories
std::string run_oracle(const ExperimentConfig& config);   // oracle.json
std::string run_psp(const ExperimentConfig& config);      // psp_exact.json
std::string run_compare(const std::string& train_dir, const std::string& oracle_file,
                        const std::string& out_dir);      // compare.json + compare.csv

// Flat-reward baseline for the pacman benchmark: plain tabular Q-learning
// on the environment state with a win-only reward, no automaton.
struct FlatBaselineResult {
    QTable q;
    int episodes_run = 0;
};
FlatBaselineResult train_flat_pacman(const class PacmanEnv& env, const LearnParams& params,
                                     std::uint64_t seed);
// Fraction of evaluation games where both foods are eaten and no ghost is
// ever touched first.
double pacman_win_rate(const class PacmanEnv& env,
                       const std::function<ActionId(EnvState)>& policy, int games, int horizon,
                       std::uint64_t seed);
// Greedy win rate of an LCRL product policy on the pacman game.
double pacman_win_rate_product(const class PacmanEnv& env, const Ldba& ldba,
                               const std::function<ActionId(const ProductState&)>& policy,
                               int games, int horizon, std::uint64_t seed);

}  // namespace lcrl
