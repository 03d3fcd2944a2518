#include "lcrl/ltl.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <random>
#include <set>

namespace lcrl {

namespace {

LtlPtr make(LtlKind kind, std::string atom, LtlPtr lhs, LtlPtr rhs) {
    auto f = std::make_shared<LtlFormula>();
    f->kind = kind;
    f->atom = std::move(atom);
    f->lhs = std::move(lhs);
    f->rhs = std::move(rhs);
    return f;
}

}  // namespace

LtlPtr ltl_true() { return make(LtlKind::True, {}, nullptr, nullptr); }
LtlPtr ltl_atom(std::string name) { return make(LtlKind::Atom, std::move(name), nullptr, nullptr); }
LtlPtr ltl_not(LtlPtr f) { return make(LtlKind::Not, {}, std::move(f), nullptr); }
LtlPtr ltl_and(LtlPtr a, LtlPtr b) { return make(LtlKind::And, {}, std::move(a), std::move(b)); }
LtlPtr ltl_or(LtlPtr a, LtlPtr b) { return make(LtlKind::Or, {}, std::move(a), std::move(b)); }
LtlPtr ltl_implies(LtlPtr a, LtlPtr b) {
    return make(LtlKind::Implies, {}, std::move(a), std::move(b));
}
LtlPtr ltl_next(LtlPtr f) { return make(LtlKind::Next, {}, std::move(f), nullptr); }
LtlPtr ltl_until(LtlPtr a, LtlPtr b) {
    return make(LtlKind::Until, {}, std::move(a), std::move(b));
}
LtlPtr ltl_eventually(LtlPtr f) { return make(LtlKind::Eventually, {}, std::move(f), nullptr); }
LtlPtr ltl_always(LtlPtr f) { return make(LtlKind::Always, {}, std::move(f), nullptr); }

bool ltl_equal(const LtlPtr& a, const LtlPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind || a->atom != b->atom) return false;
    return ltl_equal(a->lhs, b->lhs) && ltl_equal(a->rhs, b->rhs);
}

// ---------------------------------------------------------------------------
// Printing

namespace {

// Binding strength; unary operators bind tightest.
int precedence(LtlKind k) {
    switch (k) {
        case LtlKind::Implies: return 1;
        case LtlKind::Or: return 2;
        case LtlKind::And: return 3;
        case LtlKind::Until: return 4;
        default: return 5;  // unary and leaves
    }
}

bool is_false(const LtlFormula& f) {
    return f.kind == LtlKind::Not && f.lhs->kind == LtlKind::True;
}

void print_rec(const LtlPtr& f, int min_prec, std::string& out) {
    const int p = precedence(f->kind);
    const bool parens = p < min_prec;
    if (parens) out += '(';
    switch (f->kind) {
        case LtlKind::True: out += "true"; break;
        case LtlKind::Atom: out += f->atom; break;
        case LtlKind::Not:
            if (is_false(*f)) {
                out += "false";
            } else {
                out += '!';
                print_rec(f->lhs, 5, out);
            }
            break;
        case LtlKind::Next:
            out += "X ";
            print_rec(f->lhs, 5, out);
            break;
        case LtlKind::Eventually:
            out += "F ";
            print_rec(f->lhs, 5, out);
            break;
        case LtlKind::Always:
            out += "G ";
            print_rec(f->lhs, 5, out);
            break;
        case LtlKind::Until:
            print_rec(f->lhs, 5, out);  // right-assoc: left child must bind tighter
            out += " U ";
            print_rec(f->rhs, 4, out);
            break;
        case LtlKind::And:
            print_rec(f->lhs, 3, out);  // left-assoc
            out += " & ";
            print_rec(f->rhs, 4, out);
            break;
        case LtlKind::Or:
            print_rec(f->lhs, 2, out);
            out += " | ";
            print_rec(f->rhs, 3, out);
            break;
        case LtlKind::Implies:
            print_rec(f->lhs, 2, out);  // right-assoc
            out += " -> ";
            print_rec(f->rhs, 1, out);
            break;
    }
    if (parens) out += ')';
}

}  // namespace

std::string to_string(const LtlPtr& f) {
    std::string out;
    print_rec(f, 0, out);
    return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

enum class Tok { End, LParen, RParen, Not, And, Or, Implies, Next, Until, Ev, Alw, True, False, Atom };

struct Token {
    Tok kind;
    std::string text;
    std::size_t pos;
};

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '(') { out.push_back({Tok::LParen, "(", i}); ++i; continue; }
        if (c == ')') { out.push_back({Tok::RParen, ")", i}); ++i; continue; }
        if (c == '!') { out.push_back({Tok::Not, "!", i}); ++i; continue; }
        if (c == '&') { out.push_back({Tok::And, "&", i}); ++i; continue; }
        if (c == '|') { out.push_back({Tok::Or, "|", i}); ++i; continue; }
        if (c == '-') {
            if (i + 1 < text.size() && text[i + 1] == '>') {
                out.push_back({Tok::Implies, "->", i});
                i += 2;
                continue;
            }
            throw SyntaxError(i, "'->'", "stray '-'");
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
                ++j;
            std::string word(text.substr(i, j - i));
            Tok k = Tok::Atom;
            if (word == "true") k = Tok::True;
            else if (word == "false") k = Tok::False;
            else if (word == "X") k = Tok::Next;
            else if (word == "U") k = Tok::Until;
            else if (word == "F") k = Tok::Ev;
            else if (word == "G") k = Tok::Alw;
            out.push_back({k, std::move(word), i});
            i = j;
            continue;
        }
        throw SyntaxError(i, "formula token", std::string("unexpected character '") + c + "'");
    }
    out.push_back({Tok::End, "", text.size()});
    return out;
}

class Parser {
public:
    Parser(std::vector<Token> toks, const std::vector<std::string>& alphabet)
        : toks_(std::move(toks)), alphabet_(alphabet) {}

    LtlPtr run() {
        LtlPtr f = parse_implies();
        if (peek().kind != Tok::End)
            throw SyntaxError(peek().pos, "end of input", "trailing token '" + peek().text + "'");
        return f;
    }

private:
    const Token& peek() const { return toks_[idx_]; }
    Token take() { return toks_[idx_++]; }

    LtlPtr parse_implies() {
        LtlPtr lhs = parse_or();
        if (peek().kind == Tok::Implies) {
            take();
            return ltl_implies(std::move(lhs), parse_implies());
        }
        return lhs;
    }

    LtlPtr parse_or() {
        LtlPtr lhs = parse_and();
        while (peek().kind == Tok::Or) {
            take();
            lhs = ltl_or(std::move(lhs), parse_and());
        }
        return lhs;
    }

    LtlPtr parse_and() {
        LtlPtr lhs = parse_until();
        while (peek().kind == Tok::And) {
            take();
            lhs = ltl_and(std::move(lhs), parse_until());
        }
        return lhs;
    }

    LtlPtr parse_until() {
        LtlPtr lhs = parse_unary();
        if (peek().kind == Tok::Until) {
            take();
            return ltl_until(std::move(lhs), parse_until());
        }
        return lhs;
    }

    LtlPtr parse_unary() {
        switch (peek().kind) {
            case Tok::Not: take(); return ltl_not(parse_unary());
            case Tok::Next: take(); return ltl_next(parse_unary());
            case Tok::Ev: take(); return ltl_eventually(parse_unary());
            case Tok::Alw: take(); return ltl_always(parse_unary());
            default: return parse_primary();
        }
    }

    LtlPtr parse_primary() {
        const Token t = take();
        switch (t.kind) {
            case Tok::True: return ltl_true();
            case Tok::False: return ltl_not(ltl_true());
            case Tok::Atom: {
                if (std::find(alphabet_.begin(), alphabet_.end(), t.text) == alphabet_.end())
                    throw UnknownAtomError(t.text);
                return ltl_atom(t.text);
            }
            case Tok::LParen: {
                LtlPtr f = parse_implies();
                if (peek().kind != Tok::RParen)
                    throw SyntaxError(peek().pos, "')'", "unbalanced parenthesis");
                take();
                return f;
            }
            default:
                throw SyntaxError(t.pos, "'true', 'false', atom, unary operator or '('",
                                  t.kind == Tok::End ? "unexpected end of input"
                                                     : "unexpected token '" + t.text + "'");
        }
    }

    std::vector<Token> toks_;
    std::size_t idx_ = 0;
    const std::vector<std::string>& alphabet_;
};

}  // namespace

LtlPtr parse_ltl(std::string_view text, const std::vector<std::string>& alphabet) {
    return Parser(tokenize(text), alphabet).run();
}

// ---------------------------------------------------------------------------
// Desugaring

LtlPtr desugar(const LtlPtr& f) {
    switch (f->kind) {
        case LtlKind::True:
        case LtlKind::Atom: return f;
        case LtlKind::Not: return ltl_not(desugar(f->lhs));
        case LtlKind::Next: return ltl_next(desugar(f->lhs));
        case LtlKind::And: return ltl_and(desugar(f->lhs), desugar(f->rhs));
        case LtlKind::Until: return ltl_until(desugar(f->lhs), desugar(f->rhs));
        case LtlKind::Eventually: return ltl_until(ltl_true(), desugar(f->lhs));
        case LtlKind::Always:
            return ltl_not(ltl_until(ltl_true(), ltl_not(desugar(f->lhs))));
        case LtlKind::Or:
            return ltl_not(ltl_and(ltl_not(desugar(f->lhs)), ltl_not(desugar(f->rhs))));
        case LtlKind::Implies:
            return ltl_not(ltl_and(desugar(f->lhs), ltl_not(desugar(f->rhs))));
    }
    return f;  // unreachable
}

std::vector<std::string> atoms_of(const LtlPtr& f) {
    std::set<std::string> acc;
    auto walk = [&](auto&& self, const LtlPtr& g) -> void {
        if (!g) return;
        if (g->kind == LtlKind::Atom) acc.insert(g->atom);
        self(self, g->lhs);
        self(self, g->rhs);
    };
    walk(walk, f);
    return {acc.begin(), acc.end()};
}

// ---------------------------------------------------------------------------
// Lasso semantics

namespace {

// Truth table of one subformula at every position 0..p+c-1.
using Row = std::vector<char>;

std::size_t next_pos(std::size_t i, std::size_t p, std::size_t n) {
    return i + 1 < n ? i + 1 : p;
}

Row eval_rec(const LtlPtr& f, const LassoWord& w,
             std::map<const LtlFormula*, Row>& memo) {
    auto it = memo.find(f.get());
    if (it != memo.end()) return it->second;

    const std::size_t p = w.prefix.size();
    const std::size_t n = p + w.cycle.size();
    auto letter = [&](std::size_t i) { return i < p ? w.prefix[i] : w.cycle[i - p]; };
    Row row(n, 0);

    switch (f->kind) {
        case LtlKind::True:
            std::fill(row.begin(), row.end(), 1);
            break;
        case LtlKind::Atom: {
            auto pos = std::find(w.alphabet.begin(), w.alphabet.end(), f->atom);
            if (pos == w.alphabet.end()) throw UnknownAtomError(f->atom);
            const std::uint32_t bit = 1u << (pos - w.alphabet.begin());
            for (std::size_t i = 0; i < n; ++i) row[i] = (letter(i) & bit) != 0;
            break;
        }
        case LtlKind::Not: {
            Row a = eval_rec(f->lhs, w, memo);
            for (std::size_t i = 0; i < n; ++i) row[i] = !a[i];
            break;
        }
        case LtlKind::And: {
            Row a = eval_rec(f->lhs, w, memo);
            Row b = eval_rec(f->rhs, w, memo);
            for (std::size_t i = 0; i < n; ++i) row[i] = a[i] && b[i];
            break;
        }
        case LtlKind::Or: {
            Row a = eval_rec(f->lhs, w, memo);
            Row b = eval_rec(f->rhs, w, memo);
            for (std::size_t i = 0; i < n; ++i) row[i] = a[i] || b[i];
            break;
        }
        case LtlKind::Implies: {
            Row a = eval_rec(f->lhs, w, memo);
            Row b = eval_rec(f->rhs, w, memo);
            for (std::size_t i = 0; i < n; ++i) row[i] = !a[i] || b[i];
            break;
        }
        case LtlKind::Next: {
            Row a = eval_rec(f->lhs, w, memo);
            for (std::size_t i = 0; i < n; ++i) row[i] = a[next_pos(i, p, n)];
            break;
        }
        case LtlKind::Until:
        case LtlKind::Eventually: {
            Row a = f->kind == LtlKind::Until ? eval_rec(f->lhs, w, memo) : Row(n, 1);
            Row b = eval_rec(f->kind == LtlKind::Until ? f->rhs : f->lhs, w, memo);
            // Least fixpoint on the cycle: start from false, iterate to
            // stabilization (at most |cycle| rounds).
            for (std::size_t i = p; i < n; ++i) row[i] = 0;
            bool changed = true;
            while (changed) {
                changed = false;
                for (std::size_t i = n; i-- > p;) {
                    const char v = b[i] || (a[i] && row[next_pos(i, p, n)]);
                    if (v != row[i]) {
                        row[i] = v;
                        changed = true;
                    }
                }
            }
            for (std::size_t i = p; i-- > 0;) row[i] = b[i] || (a[i] && row[i + 1]);
            break;
        }
        case LtlKind::Always: {
            Row a = eval_rec(f->lhs, w, memo);
            // Greatest fixpoint on the cycle: start from true.
            for (std::size_t i = p; i < n; ++i) row[i] = 1;
            bool changed = true;
            while (changed) {
                changed = false;
                for (std::size_t i = n; i-- > p;) {
                    const char v = a[i] && row[next_pos(i, p, n)];
                    if (v != row[i]) {
                        row[i] = v;
                        changed = true;
                    }
                }
            }
            for (std::size_t i = p; i-- > 0;) row[i] = a[i] && row[i + 1];
            break;
        }
    }
    memo.emplace(f.get(), row);
    return row;
}

}  // namespace

bool eval_lasso(const LtlPtr& f, const LassoWord& w) {
    if (w.cycle.empty()) throw InvalidLengthError("lasso cycle must be nonempty");
    std::map<const LtlFormula*, Row> memo;
    return eval_rec(f, w, memo)[0] != 0;
}

LassoWord random_lasso(const std::vector<std::string>& alphabet, std::size_t prefix_len,
                       std::size_t cycle_len, std::uint64_t seed) {
    if (cycle_len == 0) throw InvalidLengthError("lasso cycle length must be >= 1");
    std::mt19937_64 rng(seed);
    const std::uint32_t letters = 1u << alphabet.size();
    std::uniform_int_distribution<std::uint32_t> dist(0, letters - 1);
    LassoWord w;
    w.alphabet = alphabet;
    w.prefix.resize(prefix_len);
    w.cycle.resize(cycle_len);
    for (auto& l : w.prefix) l = dist(rng);
    for (auto& l : w.cycle) l = dist(rng);
    return w;
}

LassoWord lasso_suffix(const LassoWord& w) {
    LassoWord out = w;
    if (!out.prefix.empty()) {
        out.prefix.erase(out.prefix.begin());
    } else {
        std::rotate(out.cycle.begin(), out.cycle.begin() + 1, out.cycle.end());
    }
    return out;
}

}  // namespace lcrl
