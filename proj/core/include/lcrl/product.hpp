#pragma once

#include <cstdint>
#include <random>

#include "lcrl/automata.hpp"
#include "lcrl/env.hpp"

namespace lcrl {

// State of the synchronous product: environment state plus automaton state.
// aut == reject index (num_states of the automaton) marks the implicit
// absorbing reject state entered on a missing automaton transition.
struct ProductState {
    EnvState env = 0;
    int aut = 0;
    bool operator==(const ProductState&) const = default;
};

struct RewardParams {
    double r_p = 1.0;  // reward on visiting a frontier state
    double r_n = 0.0;  // neutral reward
};

// Everything needed to run the product on the fly. Owns nothing; env and
// automaton must outlive it.
class ProductContext {
public:
    ProductContext(const LabeledEnv& env, const Ldba& ldba);

    const LabeledEnv& env() const { return *env_; }
    const Ldba& ldba() const { return *ldba_; }

    int reject_state() const { return ldba_->num_states(); }
    bool is_sink(int q) const;  // automaton sinks plus the reject state
    const std::vector<int>& sinks() const { return sinks_; }

    ProductState initial() const { return {env_->reset(), ldba_->initial}; }

    // Epsilon actions are appended after the environment's action ids:
    // id = num_env_actions + target automaton state.
    int num_env_actions() const { return static_cast<int>(env_->action_names().size()); }
    bool is_eps_action(ActionId a) const { return a >= num_env_actions(); }
    int eps_target(ActionId a) const { return a - num_env_actions(); }
    ActionId eps_action(int target_q) const { return num_env_actions() + target_q; }
    std::string action_name(ActionId a) const;

    std::vector<ActionId> available_actions(const ProductState& p) const;
    ProductState step(const ProductState& p, ActionId a, std::mt19937_64& rng) const;

    // Automaton successor on reading the labels of an environment state.
    int read(int q, EnvState env_next) const;

private:
    const LabeledEnv* env_;
    const Ldba* ldba_;
    Ldba compiled_;
    std::vector<Letter> projection_;  // host letter -> automaton letter
    std::vector<int> sinks_;
};

// Reward for arriving in p_next under frontier A, then the frontier update
// (applied after the reward is decided). The reject state never pays.
// Epsilon moves read no label: they neither pay nor rotate the frontier;
// a frontier state entered by an epsilon guess still pays on the next
// reading step that keeps the run inside it.
std::pair<double, FrontierSet> reward_and_update(const Ldba& ldba, const ProductState& p_next,
                                                 const FrontierSet& frontier,
                                                 const RewardParams& params,
                                                 bool via_epsilon = false);

// Packing helpers shared by the learner tables and exports.
inline std::uint64_t pack_product(const ProductState& p) {
    return (static_cast<std::uint64_t>(p.env) << 9) | static_cast<std::uint64_t>(p.aut);
}
inline ProductState unpack_product(std::uint64_t key) {
    return {static_cast<EnvState>(key >> 9), static_cast<int>(key & 0x1ff)};
}
inline std::uint64_t pack_product_action(const ProductState& p, ActionId a) {
    return (pack_product(p) << 9) | static_cast<std::uint64_t>(a);
}

}  // namespace lcrl
