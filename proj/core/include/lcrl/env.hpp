#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lcrl/errors.hpp"

namespace lcrl {

using EnvState = std::int64_t;
using ActionId = int;

// Fully expanded model of an enumerable environment. States are indexed
// 0..n-1; rows are sparse (next state, probability) lists aligned with the
// per-state action lists.
struct ExplicitMdp {
    int n_states = 0;
    int initial = 0;
    std::vector<std::string> ap;
    std::vector<std::uint32_t> labels;                 // bitmask per state
    std::vector<std::string> action_names;             // global action ids
    std::vector<std::vector<ActionId>> actions;        // per state
    std::vector<std::vector<std::vector<std::pair<int, double>>>> rows;  // [state][action slot]

    const std::vector<std::pair<int, double>>& row(int s, ActionId a) const;
};

// Samplable labelled environment. step() is the behavioural contract;
// transition_row() is the closed-form law used for enumeration, kept as an
// independent code path so the two can be checked against each other.
class LabeledEnv {
public:
    virtual ~LabeledEnv() = default;

    virtual EnvState reset() const = 0;
    virtual std::vector<ActionId> actions(EnvState s) const = 0;
    virtual EnvState step(EnvState s, ActionId a, std::mt19937_64& rng) const = 0;
    virtual std::uint32_t labels(EnvState s) const = 0;

    virtual const std::vector<std::string>& ap() const = 0;
    virtual const std::vector<std::string>& action_names() const = 0;

    virtual bool is_enumerable() const { return false; }
    virtual int num_states() const { throw NotEnumerableError("environment is not enumerable"); }
    virtual std::vector<std::pair<EnvState, double>> transition_row(EnvState, ActionId) const {
        throw NotEnumerableError("environment has no closed-form transition law");
    }

    std::vector<std::string> label_names(EnvState s) const;
};

// Expands an enumerable environment (up to 200k states) into a table.
ExplicitMdp explicit_mdp(const LabeledEnv& env);

}  // namespace lcrl
