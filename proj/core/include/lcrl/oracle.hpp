#pragma once

#include <functional>
#include <vector>

#include "lcrl/automata.hpp"
#include "lcrl/env.hpp"

namespace lcrl {

// Fully expanded product of an explicit MDP with an LDBA. All |S| x |Q|
// pairs are materialised (index s * n_q + q) plus one absorbing reject
// state at index n_pairs for missing automaton transitions. Action ids
// match the on-the-fly product: environment ids first, then epsilon ids
// (num_env_actions + target automaton state).
struct ExplicitProduct {
    int n_env = 0;
    int n_q = 0;
    int n_pairs = 0;
    int reject = 0;     // == n_pairs
    int total = 0;      // n_pairs + 1
    int initial = 0;
    int num_env_actions = 0;
    int num_acceptance_sets = 0;

    std::vector<std::string> action_names;              // environment actions
    std::vector<std::vector<ActionId>> actions;         // per product state
    std::vector<std::vector<std::vector<std::pair<int, double>>>> rows;
    std::vector<std::vector<char>> acc_q;               // [j][q]
    std::vector<std::uint32_t> env_labels;              // environment label masks
    std::vector<char> reachable;                        // from the initial state

    int pair_index(int s, int q) const { return s * n_q + q; }
    int env_of(int x) const { return x == reject ? -1 : x / n_q; }
    int aut_of(int x) const { return x == reject ? n_q : x % n_q; }
    bool accepting(int x, int j) const { return x != reject && acc_q[j][aut_of(x)]; }

    const std::vector<std::pair<int, double>>& row(int x, ActionId a) const;
    std::string action_name(ActionId a, const Ldba& ldba) const;
};

// Throws TooLargeError above 10^6 pairs.
ExplicitProduct build_product(const ExplicitMdp& mdp, const Ldba& ldba);

// Maximal end component: states plus the per-state actions that keep all
// probability mass inside.
struct Mec {
    std::vector<int> states;                    // sorted product states
    std::vector<std::vector<ActionId>> allowed; // aligned with states
    bool accepting = false;                     // meets every acceptance set
};

std::vector<Mec> mec_decomposition(const ExplicitProduct& p);

// Flags over product states: union of accepting MECs.
std::vector<char> accepting_mec_union(const ExplicitProduct& p, const std::vector<Mec>& mecs);

// States from which the target is unreachable under every policy.
std::vector<char> prob0_states(const ExplicitProduct& p, const std::vector<char>& target);

// Gauss-Seidel value iteration from below with the target pinned at 1.
// Converges to the maximal probability of reaching the target.
std::vector<double> max_reach_probability(const ExplicitProduct& p,
                                          const std::vector<char>& target, double tol = 1e-12,
                                          int max_sweeps = 200000);

// One unpinned Bellman sweep (Jacobi); exposed for the contraction checks.
std::vector<double> bellman_apply(const ExplicitProduct& p, const std::vector<double>& v);

// Greedy extraction from a converged value vector. Ties break toward
// actions that make graph progress to the target, then lowest id. Inside
// accepting MECs the policy instead cycles through the acceptance sets via
// shortest paths, so the induced chain keeps visiting all of them.
std::vector<ActionId> optimal_policy_from_values(const ExplicitProduct& p,
                                                 const std::vector<double>& values,
                                                 const std::vector<Mec>& mecs);

struct ChainAnalysis {
    std::vector<std::vector<int>> recurrent_classes;  // reachable ones only
    std::vector<char> class_accepting;
    std::vector<int> transient;  // reachable transient states
    double satisfaction_probability = 0.0;
    int closeness = 0;  // most acceptance sets met by one recurrent class
};

// Decomposition of the Markov chain induced by a (total) policy, plus the
// probability of absorption into accepting recurrent classes.
ChainAnalysis chain_analysis(const ExplicitProduct& p,
                             const std::function<ActionId(int)>& policy, double tol = 1e-13);

// Best achievable closeness over MECs reachable from the initial state.
int max_closeness(const ExplicitProduct& p, const std::vector<Mec>& mecs);

// Everything criterion-grade checks need in one call.
struct OracleReport {
    std::vector<Mec> mecs;
    int amec_count = 0;
    std::vector<double> values;       // max reach probability to the AMEC union
    double value_at_initial = 0.0;
    std::vector<ActionId> policy;
};
OracleReport oracle_solve(const ExplicitProduct& p);

}  // namespace lcrl
