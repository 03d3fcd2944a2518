#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "lcrl/errors.hpp"

namespace lcrl {

// Abstract syntax of a linear-time property. Base connectives are
// {True, Atom, Not, And, Next, Until}; the remaining kinds are surface
// sugar removed by desugar(). "false" is parsed as Not(True).
enum class LtlKind {
    True,
    Atom,
    Not,
    And,
    Or,
    Implies,
    Next,
    Until,
    Eventually,
    Always,
};

struct LtlFormula;
using LtlPtr = std::shared_ptr<const LtlFormula>;

struct LtlFormula {
    LtlKind kind;
    std::string atom;  // set iff kind == Atom
    LtlPtr lhs;        // unary child or binary left
    LtlPtr rhs;        // binary right
};

LtlPtr ltl_true();
LtlPtr ltl_atom(std::string name);
LtlPtr ltl_not(LtlPtr f);
LtlPtr ltl_and(LtlPtr a, LtlPtr b);
LtlPtr ltl_or(LtlPtr a, LtlPtr b);
LtlPtr ltl_implies(LtlPtr a, LtlPtr b);
LtlPtr ltl_next(LtlPtr f);
LtlPtr ltl_until(LtlPtr a, LtlPtr b);
LtlPtr ltl_eventually(LtlPtr f);
LtlPtr ltl_always(LtlPtr f);

bool ltl_equal(const LtlPtr& a, const LtlPtr& b);

// Minimal-parenthesis rendering; parse_ltl(to_string(f)) == f.
std::string to_string(const LtlPtr& f);

// Recursive-descent parser for the ASCII surface grammar:
//   true false atom ! & | -> X U F G ( )
// with precedence (tightest first) {!,X,F,G} > U > & > | > ->.
// U and -> associate to the right, & and | to the left.
LtlPtr parse_ltl(std::string_view text, const std::vector<std::string>& alphabet);

// Rewrites to the base grammar: F f = true U f, G f = !(true U !f),
// a | b = !(!a & !b), a -> b = !(a & !b).
LtlPtr desugar(const LtlPtr& f);

// Atom names appearing in the formula, sorted and deduplicated.
std::vector<std::string> atoms_of(const LtlPtr& f);

// An ultimately periodic word prefix . cycle^omega over 2^AP.
// Letters are bitmasks over the alphabet vector (bit i <=> alphabet[i]).
struct LassoWord {
    std::vector<std::string> alphabet;
    std::vector<std::uint32_t> prefix;
    std::vector<std::uint32_t> cycle;  // nonempty

    std::size_t length() const { return prefix.size() + cycle.size(); }
};

// Exact evaluation of f on the infinite word prefix . cycle^omega.
// Until/Eventually are least fixpoints on the cycle positions, Always a
// greatest fixpoint; prefix positions are then back-propagated.
bool eval_lasso(const LtlPtr& f, const LassoWord& w);

// Uniformly random lasso over 2^AP; a deterministic function of seed.
LassoWord random_lasso(const std::vector<std::string>& alphabet, std::size_t prefix_len,
                       std::size_t cycle_len, std::uint64_t seed);

// Drops the first letter of the word: rotates the cycle when the prefix
// is empty. Used by the Until expansion-law property tests.
LassoWord lasso_suffix(const LassoWord& w);

}  // namespace lcrl
