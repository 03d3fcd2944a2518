#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lcrl/errors.hpp"
#include "lcrl/ltl.hpp"

namespace lcrl {

// A letter is a bitmask over the automaton alphabet (bit i <=> ap[i]).
using Letter = std::uint32_t;

// One reading transition: fires on every letter in `letters`.
struct LdbaEdge {
    int from = 0;
    int to = 0;
    std::vector<Letter> letters;  // sorted, deduplicated
};

// Limit-deterministic generalized Büchi automaton. Reading transitions are
// deterministic everywhere (the stronger form produced by the construction
// this codebase targets); nondeterminism enters only through epsilon moves
// out of the initial part. A missing (state, letter) entry means the run is
// abandoned: executions route it to an implicit absorbing reject state.
class Ldba {
public:
    std::vector<std::string> ap;
    std::vector<std::string> state_names;
    int initial = 0;
    std::vector<LdbaEdge> edges;
    std::vector<std::vector<int>> eps;         // epsilon successors per state
    std::vector<std::vector<int>> acceptance;  // F_1..F_f, each sorted
    std::vector<bool> in_qd;                   // partition flag per state

    int num_states() const { return static_cast<int>(state_names.size()); }
    int num_letters() const { return 1 << ap.size(); }
    int num_acceptance_sets() const { return static_cast<int>(acceptance.size()); }

    // Compiles the edge list into the dense lookup table and checks for
    // overlapping letters (throws NotLimitDeterministicError).
    void compile();

    // Deterministic read; -1 encodes the implicit reject state.
    int step(int q, Letter a) const { return delta_[q * num_letters() + a]; }

    bool is_accepting(int q, int j) const;
    bool is_accepting_any(int q) const;

    // Projects a label set of a host environment onto this alphabet.
    Letter project(const std::vector<std::string>& host_ap, std::uint32_t host_labels) const;

    // Precomputed per-host-alphabet projection table (index: host letter).
    std::vector<Letter> projection_table(const std::vector<std::string>& host_ap) const;

private:
    std::vector<int> delta_;  // num_states x num_letters, -1 = undefined
};

struct PartitionReport {
    std::vector<int> q_n;
    std::vector<int> q_d;
    int num_acceptance_sets = 0;
    bool qd_reachable = false;
};

// Checks all structural invariants: disjoint covering partition, acceptance
// inside Q_D, Q_D invariant under delta, no epsilon moves out of Q_D,
// deterministic reading transitions, at least one acceptance set.
PartitionReport validate_ldba(const Ldba& a);

// The set of automaton states still owed a visit in the current round of
// the acceptance condition.
struct FrontierSet {
    std::vector<int> states;  // sorted

    bool contains(int q) const;
    bool operator==(const FrontierSet& other) const { return states == other.states; }
};

// Union of all acceptance sets (the reset value of the frontier).
FrontierSet initial_frontier(const Ldba& a);

// Acc(q, A): removes every acceptance set containing q from A; when the
// removal empties the frontier it restarts from the union of all sets
// (minus the just-visited ones when that is nonempty).
FrontierSet accepting_frontier(const Ldba& a, int q, const FrontierSet& frontier);

// Union of all maximal strongly connected, transition-closed components
// that miss at least one acceptance set. Entering one makes acceptance
// impossible. Result sorted; may be empty.
std::vector<int> find_sinks(const Ldba& a);

// Decides whether some run over prefix . cycle^omega (resolving epsilon
// moves nondeterministically) visits every acceptance set infinitely
// often: SCC analysis of the lasso-graph x automaton product.
bool accepts_lasso(const Ldba& a, const LassoWord& w);

// Line-oriented text format (see README). Throws FormatError / validation
// errors. save/load round-trip to an equivalent automaton.
Ldba load_automaton(const std::string& text);
std::string save_automaton(const Ldba& a);

// Boolean label expression over the alphabet ("!u & t", "true", ...)
// expanded to the set of letters satisfying it.
std::vector<Letter> compile_label(const std::string& expr, const std::vector<std::string>& ap);

// Inverse of compile_label: a compact disjunction-of-cubes rendering.
std::string render_letters(const std::vector<Letter>& letters, const std::vector<std::string>& ap);

bool ldba_equal(const Ldba& a, const Ldba& b);

}  // namespace lcrl
