#pragma once

#include <string>
#include <vector>

#include "lcrl/automata.hpp"
#include "lcrl/ltl.hpp"

namespace lcrl {

// Compiles a supported property shape into an equivalent LDBA. The shape is
// a conjunction of clauses of the forms
//   F phi            phi built from atoms, &, | and nested F
//   G (a -> G a)     absorbing obligation
//   G F a            recurrence (any number, folded into one round-robin)
//   G !a             safety
//   F G a            at most one; realised with an epsilon guess
// Throws UnsupportedFragmentError naming the offending clause.
Ldba translate_fragment(const LtlPtr& f, const std::vector<std::string>& alphabet);

// Hand-encoded automata bundled with the benchmark fixtures:
//   fig3_reach_stay_safe  reach t then stay, trapping unsafe region (t, u)
//   fig4_fg_t             eventually always t, epsilon guess (t)
//   fig5_sequenced        visit p then t and stay, trapping unsafe (p, t, u)
//   fig6_pacman           eat both foods in either order, ghosts trap (f1, f2, g, n)
//   fig10_gfa_gfb_gnc     visit A and B infinitely often, never C (A, B, C)
// Throws UnknownNameError otherwise.
Ldba builtin_automaton(const std::string& name);

std::vector<std::string> builtin_automaton_names();

// The property each bundled automaton recognises over its fixtures' words,
// as surface text suitable for parse_ltl.
std::string builtin_automaton_property(const std::string& name);

}  // namespace lcrl
