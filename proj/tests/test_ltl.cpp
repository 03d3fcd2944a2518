#include <doctest.h>

#include <map>
#include <random>

#include "helpers.hpp"
#include "lcrl/ltl.hpp"

using namespace lcrl;

namespace {
const std::vector<std::string> kTU{"t", "u"};
const std::vector<std::string> kABC{"A", "B", "C"};

LassoWord word(const std::vector<std::string>& ap, std::vector<std::uint32_t> prefix,
               std::vector<std::uint32_t> cycle) {
    return {ap, std::move(prefix), std::move(cycle)};
}
}  // namespace

TEST_CASE("parse: property shapes") {
    const auto p7 = parse_ltl("F t & G(t -> G t) & G(u -> G u)", kTU);
    // Left-folded conjunction of the three clauses.
    REQUIRE(p7->kind == LtlKind::And);
    CHECK(p7->lhs->kind == LtlKind::And);
    CHECK(p7->lhs->lhs->kind == LtlKind::Eventually);
    CHECK(p7->lhs->rhs->kind == LtlKind::Always);
    CHECK(p7->rhs->lhs->kind == LtlKind::Implies);

    CHECK(parse_ltl("true", kTU)->kind == LtlKind::True);

    const auto p11 = parse_ltl("G F A & G F B & G !C", kABC);
    CHECK(p11->rhs->lhs->kind == LtlKind::Not);
    CHECK(p11->lhs->lhs->lhs->kind == LtlKind::Eventually);
}

TEST_CASE("parse: precedence and associativity") {
    CHECK(ltl_equal(parse_ltl("a U b U c", {"a", "b", "c"}),
                    parse_ltl("a U (b U c)", {"a", "b", "c"})));
    CHECK(ltl_equal(parse_ltl("!a & b | c -> d", {"a", "b", "c", "d"}),
                    parse_ltl("(((!a) & b) | c) -> d", {"a", "b", "c", "d"})));
    CHECK(ltl_equal(parse_ltl("a -> b -> c", {"a", "b", "c"}),
                    parse_ltl("a -> (b -> c)", {"a", "b", "c"})));
    CHECK(ltl_equal(parse_ltl("F a & b", {"a", "b"}),
                    parse_ltl("(F a) & b", {"a", "b"})));
    CHECK(ltl_equal(parse_ltl("false", kTU), ltl_not(ltl_true())));
}

TEST_CASE("parse: errors carry position and expectation") {
    CHECK_THROWS_AS(parse_ltl("F t &", kTU), SyntaxError);
    CHECK_THROWS_AS(parse_ltl("(t", kTU), SyntaxError);
    CHECK_THROWS_AS(parse_ltl("t )", kTU), SyntaxError);
    CHECK_THROWS_AS(parse_ltl("t - u", kTU), SyntaxError);
    CHECK_THROWS_AS(parse_ltl("F v", kTU), UnknownAtomError);
    try {
        parse_ltl("t & & u", kTU);
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.position == 4);
        CHECK(!e.expected.empty());
    }
}

TEST_CASE("desugar: derived operators reduce to the base grammar") {
    const auto t = ltl_atom("t");
    CHECK(ltl_equal(desugar(ltl_eventually(t)), ltl_until(ltl_true(), t)));
    CHECK(ltl_equal(desugar(ltl_always(t)),
                    ltl_not(ltl_until(ltl_true(), ltl_not(t)))));
    CHECK(ltl_equal(desugar(t), t));

    auto only_base = [](const LtlPtr& f) {
        auto walk = [](auto&& self, const LtlPtr& g) -> bool {
            if (!g) return true;
            switch (g->kind) {
                case LtlKind::True:
                case LtlKind::Atom:
                case LtlKind::Not:
                case LtlKind::And:
                case LtlKind::Next:
                case LtlKind::Until: return self(self, g->lhs) && self(self, g->rhs);
                default: return false;
            }
        };
        return walk(walk, f);
    };
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i)
        CHECK(only_base(desugar(testing::random_formula(kTU, 4, rng))));
}

TEST_CASE("round-trip: parse(print(f)) == f on random formulas") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 500; ++i) {
        const auto f = testing::random_formula(kABC, 5, rng);
        CAPTURE(to_string(f));
        CHECK(ltl_equal(parse_ltl(to_string(f), kABC), f));
    }
}

TEST_CASE("eval_lasso: base cases") {
    CHECK(eval_lasso(ltl_true(), word(kTU, {}, {0})));
    CHECK(eval_lasso(parse_ltl("F t", kTU), word(kTU, {0}, {1})));
    // Once u holds forever, the target can no longer be reached.
    const auto p7 = parse_ltl("F t & G(t -> G t) & G(u -> G u)", kTU);
    CHECK_FALSE(eval_lasso(p7, word(kTU, {0, 2}, {2})));

    CHECK(eval_lasso(parse_ltl("G t", kTU), word(kTU, {}, {1, 3})));
    CHECK_FALSE(eval_lasso(parse_ltl("G t", kTU), word(kTU, {1}, {0})));
    CHECK(eval_lasso(parse_ltl("X u", kTU), word(kTU, {1}, {2})));
    CHECK(eval_lasso(parse_ltl("t U u", kTU), word(kTU, {1, 1}, {2})));
    CHECK_FALSE(eval_lasso(parse_ltl("t U u", kTU), word(kTU, {1, 0}, {2})));
    CHECK(eval_lasso(parse_ltl("G F A", kABC), word(kABC, {0}, {0, 1, 0})));
    CHECK_FALSE(eval_lasso(parse_ltl("G F A", kABC), word(kABC, {1}, {0})));
}

TEST_CASE("eval_lasso: desugaring preserves semantics on random pairs") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 1000; ++i) {
        const auto f = testing::random_formula(kTU, 4, rng);
        const auto w = random_lasso(kTU, i % 5, 1 + i % 4, 1000 + i);
        CAPTURE(to_string(f));
        CHECK(eval_lasso(f, w) == eval_lasso(desugar(f), w));
    }
}

TEST_CASE("eval_lasso: semantic identities") {
    std::mt19937_64 rng(37);
    for (int i = 0; i < 500; ++i) {
        const auto f = testing::random_formula(kTU, 3, rng);
        const auto g = testing::random_formula(kTU, 3, rng);
        const auto w = random_lasso(kTU, i % 4, 1 + i % 3, 5000 + i);
        CHECK(eval_lasso(ltl_not(ltl_not(f)), w) == eval_lasso(f, w));
        // f U g  <=>  g or (f and X(f U g))
        const auto u = ltl_until(f, g);
        const bool expansion =
            eval_lasso(g, w) || (eval_lasso(f, w) && eval_lasso(u, lasso_suffix(w)));
        CHECK(eval_lasso(u, w) == expansion);
    }
}

TEST_CASE("random_lasso: determinism and shape") {
    const auto a = random_lasso(kTU, 0, 1, 7);
    const auto b = random_lasso(kTU, 0, 1, 7);
    CHECK(a.prefix == b.prefix);
    CHECK(a.cycle == b.cycle);
    CHECK(a.cycle.size() == 1);

    const auto empty_ap = random_lasso({}, 2, 2, 99);
    CHECK(empty_ap.prefix == std::vector<std::uint32_t>{0, 0});
    CHECK(empty_ap.cycle == std::vector<std::uint32_t>{0, 0});

    CHECK_THROWS_AS(random_lasso(kTU, 1, 0, 1), InvalidLengthError);
}

TEST_CASE("random_lasso: letters are uniform over 2^AP") {
    std::map<std::uint32_t, int> counts;
    int total = 0;
    for (int i = 0; i < 2500; ++i) {
        const auto w = random_lasso(kTU, 2, 2, 31000 + i);
        for (auto l : w.prefix) ++counts[l], ++total;
        for (auto l : w.cycle) ++counts[l], ++total;
    }
    REQUIRE(counts.size() == 4);
    for (const auto& [letter, n] : counts) {
        const double freq = static_cast<double>(n) / total;
        CHECK(freq == doctest::Approx(0.25).epsilon(0.12));  // 25% +- 3pp
    }
}
