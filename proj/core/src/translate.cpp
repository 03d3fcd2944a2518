#include "lcrl/translate.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <optional>
#include <set>

namespace lcrl {

namespace {

// ---------------------------------------------------------------------------
// Clause classification

struct Clauses {
    std::vector<LtlPtr> reach;             // full "F phi" clauses
    std::vector<std::string> absorbing;    // a of G(a -> G a)
    std::vector<std::string> recurrence;   // a of G F a, in clause order
    std::vector<std::string> safety;       // a of G !a
    std::string fg_atom;                   // a of F G a
    bool has_fg = false;
};

void split_conjunction(const LtlPtr& f, std::vector<LtlPtr>& out) {
    if (f->kind == LtlKind::And) {
        split_conjunction(f->lhs, out);
        split_conjunction(f->rhs, out);
    } else {
        out.push_back(f);
    }
}

bool is_reach_body(const LtlPtr& f) {
    switch (f->kind) {
        case LtlKind::Atom: return true;
        case LtlKind::And:
        case LtlKind::Or: return is_reach_body(f->lhs) && is_reach_body(f->rhs);
        case LtlKind::Eventually: return is_reach_body(f->lhs);
        default: return false;
    }
}

Clauses classify(const LtlPtr& f) {
    Clauses out;
    std::vector<LtlPtr> clauses;
    split_conjunction(f, clauses);
    for (const auto& c : clauses) {
        if (c->kind == LtlKind::True) continue;
        if (c->kind == LtlKind::Always) {
            const auto& body = c->lhs;
            if (body->kind == LtlKind::Not && body->lhs->kind == LtlKind::Atom) {
                out.safety.push_back(body->lhs->atom);
                continue;
            }
            if (body->kind == LtlKind::Eventually && body->lhs->kind == LtlKind::Atom) {
                out.recurrence.push_back(body->lhs->atom);
                continue;
            }
            if (body->kind == LtlKind::Implies && body->lhs->kind == LtlKind::Atom &&
                body->rhs->kind == LtlKind::Always && body->rhs->lhs->kind == LtlKind::Atom &&
                body->rhs->lhs->atom == body->lhs->atom) {
                out.absorbing.push_back(body->lhs->atom);
                continue;
            }
            throw UnsupportedFragmentError(to_string(c));
        }
        if (c->kind == LtlKind::Eventually) {
            if (c->lhs->kind == LtlKind::Always && c->lhs->lhs->kind == LtlKind::Atom) {
                if (out.has_fg) throw UnsupportedFragmentError(to_string(c));
                out.has_fg = true;
                out.fg_atom = c->lhs->lhs->atom;
                continue;
            }
            if (is_reach_body(c->lhs)) {
                out.reach.push_back(c);
                continue;
            }
            throw UnsupportedFragmentError(to_string(c));
        }
        throw UnsupportedFragmentError(to_string(c));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Derivatives of reach clauses

bool is_true(const LtlPtr& f) { return f->kind == LtlKind::True; }
bool is_false(const LtlPtr& f) { return f->kind == LtlKind::Not && f->lhs->kind == LtlKind::True; }

void flatten(LtlKind k, const LtlPtr& f, std::vector<LtlPtr>& out) {
    if (f->kind == k) {
        flatten(k, f->lhs, out);
        flatten(k, f->rhs, out);
    } else {
        out.push_back(f);
    }
}

LtlPtr rebuild(LtlKind k, std::vector<LtlPtr> parts, const LtlPtr& empty_value) {
    std::sort(parts.begin(), parts.end(),
              [](const LtlPtr& a, const LtlPtr& b) { return to_string(a) < to_string(b); });
    parts.erase(std::unique(parts.begin(), parts.end(),
                            [](const LtlPtr& a, const LtlPtr& b) { return ltl_equal(a, b); }),
                parts.end());
    if (parts.empty()) return empty_value;
    LtlPtr acc = parts.back();
    for (std::size_t i = parts.size() - 1; i-- > 0;)
        acc = k == LtlKind::And ? ltl_and(parts[i], acc) : ltl_or(parts[i], acc);
    return acc;
}

LtlPtr simplify_or(const std::vector<LtlPtr>& in) {
    std::vector<LtlPtr> parts;
    for (const auto& f : in) {
        if (is_true(f)) return ltl_true();
        if (is_false(f)) continue;
        flatten(LtlKind::Or, f, parts);
    }
    return rebuild(LtlKind::Or, std::move(parts), ltl_not(ltl_true()));
}

LtlPtr simplify_and(const std::vector<LtlPtr>& in) {
    std::vector<LtlPtr> parts;
    for (const auto& f : in) {
        if (is_false(f)) return ltl_not(ltl_true());
        if (is_true(f)) continue;
        flatten(LtlKind::And, f, parts);
    }
    return rebuild(LtlKind::And, std::move(parts), ltl_true());
}

// One-letter derivative of a pure-eventuality formula: the residual
// obligation after reading `letter`. Reaches "true" exactly on the finite
// witnesses of the clause.
LtlPtr af(const LtlPtr& f, Letter letter, const std::vector<std::string>& ap) {
    switch (f->kind) {
        case LtlKind::True: return f;
        case LtlKind::Atom: {
            const auto it = std::find(ap.begin(), ap.end(), f->atom);
            if (it == ap.end()) throw UnknownAtomError(f->atom);
            const bool holds = (letter >> (it - ap.begin())) & 1u;
            return holds ? ltl_true() : ltl_not(ltl_true());
        }
        case LtlKind::And: return simplify_and({af(f->lhs, letter, ap), af(f->rhs, letter, ap)});
        case LtlKind::Or: return simplify_or({af(f->lhs, letter, ap), af(f->rhs, letter, ap)});
        case LtlKind::Eventually: return simplify_or({af(f->lhs, letter, ap), f});
        default: break;
    }
    if (is_false(f)) return f;
    throw UnsupportedFragmentError(to_string(f));
}

// ---------------------------------------------------------------------------
// Product of the clause trackers

struct TrackerState {
    std::vector<LtlPtr> reach;  // residual per reach clause
    std::uint32_t absorb = 0;   // triggered absorbing atoms (bitmask over list)
    int rr = 0;                 // 0 = round complete, i>=1 = owing atom i-1
    int guess = 0;              // 1 once the epsilon jump was taken

    std::string key() const {
        std::string k;
        for (const auto& r : reach) k += to_string(r) + ';';
        k += '|';
        k += std::to_string(absorb) + '|' + std::to_string(rr) + '|' + std::to_string(guess);
        return k;
    }
};

}  // namespace

Ldba translate_fragment(const LtlPtr& f, const std::vector<std::string>& alphabet) {
    if (alphabet.size() > 16) throw TooLargeError("alphabet too large for letter expansion");
    const Clauses clauses = classify(f);
    const int num_letters = 1 << alphabet.size();

    auto atom_bit = [&](const std::string& name) -> Letter {
        const auto it = std::find(alphabet.begin(), alphabet.end(), name);
        if (it == alphabet.end()) throw UnknownAtomError(name);
        return 1u << (it - alphabet.begin());
    };
    Letter safety_mask = 0;
    for (const auto& a : clauses.safety) safety_mask |= atom_bit(a);
    std::vector<Letter> absorbing_bits;
    for (const auto& a : clauses.absorbing) absorbing_bits.push_back(atom_bit(a));
    std::vector<Letter> rr_bits;
    for (const auto& a : clauses.recurrence) rr_bits.push_back(atom_bit(a));
    const Letter fg_bit = clauses.has_fg ? atom_bit(clauses.fg_atom) : 0;
    const int k = static_cast<int>(rr_bits.size());

    // Reading successor; nullopt means the run is abandoned.
    auto read = [&](const TrackerState& s, Letter l) -> std::optional<TrackerState> {
        if (l & safety_mask) return std::nullopt;
        for (std::size_t i = 0; i < absorbing_bits.size(); ++i)
            if ((s.absorb >> i & 1u) && !(l & absorbing_bits[i])) return std::nullopt;
        if (s.guess && !(l & fg_bit)) return std::nullopt;
        TrackerState t = s;
        for (std::size_t i = 0; i < absorbing_bits.size(); ++i)
            if (l & absorbing_bits[i]) t.absorb |= 1u << i;
        for (auto& r : t.reach) r = af(r, l, alphabet);
        if (k > 0) {
            int j = s.rr == 0 ? 0 : s.rr - 1;
            while (j < k && (l & rr_bits[j])) ++j;
            t.rr = j >= k ? 0 : j + 1;
        }
        return t;
    };

    TrackerState init;
    init.reach = clauses.reach;

    std::map<std::string, int> index;
    std::vector<TrackerState> states;
    std::queue<int> todo;
    auto intern = [&](const TrackerState& s) {
        const auto [it, fresh] = index.emplace(s.key(), static_cast<int>(states.size()));
        if (fresh) {
            states.push_back(s);
            todo.push(it->second);
            if (states.size() > 20000) throw TooLargeError("fragment automaton exploded");
        }
        return it->second;
    };

    Ldba a;
    a.ap = alphabet;
    a.initial = intern(init);
    std::map<std::pair<int, int>, std::vector<Letter>> grouped;
    std::vector<std::pair<int, int>> eps_list;
    while (!todo.empty()) {
        const int id = todo.front();
        todo.pop();
        const TrackerState s = states[id];
        for (Letter l = 0; l < static_cast<Letter>(num_letters); ++l) {
            const auto t = read(s, l);
            if (!t) continue;
            grouped[{id, intern(*t)}].push_back(l);
        }
        if (clauses.has_fg && !s.guess) {
            TrackerState g = s;
            g.guess = 1;
            eps_list.emplace_back(id, intern(g));
        }
    }

    const int n = static_cast<int>(states.size());
    a.state_names.resize(n);
    for (int i = 0; i < n; ++i) a.state_names[i] = "q" + std::to_string(i);
    for (auto& [key, letters] : grouped) a.edges.push_back({key.first, key.second, letters});
    a.eps.assign(n, {});
    for (const auto& [from, to] : eps_list) a.eps[from].push_back(to);

    std::vector<int> accepting;
    for (int i = 0; i < n; ++i) {
        const TrackerState& s = states[i];
        const bool reach_done =
            std::all_of(s.reach.begin(), s.reach.end(), [](const LtlPtr& r) { return is_true(r); });
        if (reach_done && s.rr == 0 && (!clauses.has_fg || s.guess)) accepting.push_back(i);
    }
    a.acceptance.push_back(std::move(accepting));

    a.in_qd.resize(n);
    for (int i = 0; i < n; ++i) a.in_qd[i] = clauses.has_fg ? states[i].guess == 1 : true;

    a.compile();
    validate_ldba(a);
    return a;
}

// ---------------------------------------------------------------------------
// Bundled automata

namespace {

struct RawEdge {
    int from;
    const char* label;
    int to;
};

Ldba assemble(std::vector<std::string> ap, int n_states, int initial,
              const std::vector<RawEdge>& raw, const std::vector<std::pair<int, int>>& eps,
              const std::vector<std::vector<int>>& acceptance, const std::vector<int>& qd) {
    Ldba a;
    a.ap = std::move(ap);
    a.state_names.resize(n_states);
    for (int i = 0; i < n_states; ++i) a.state_names[i] = "q" + std::to_string(i);
    a.initial = initial;
    for (const auto& e : raw) a.edges.push_back({e.from, e.to, compile_label(e.label, a.ap)});
    a.eps.assign(n_states, {});
    for (const auto& [from, to] : eps) a.eps[from].push_back(to);
    a.acceptance = acceptance;
    for (auto& f : a.acceptance) std::sort(f.begin(), f.end());
    a.in_qd.assign(n_states, false);
    for (int q : qd) a.in_qd[q] = true;
    a.compile();
    validate_ldba(a);
    return a;
}

// The pacman automaton reads exactly one tag per step, so its transitions
// are defined on single-proposition letters only; everything else routes to
// the implicit reject state.
Ldba make_fig6() {
    Ldba a;
    a.ap = {"f1", "f2", "g", "n"};
    a.state_names = {"q0", "q1", "q2", "q3", "q4"};
    a.initial = 0;
    const Letter F1 = 1, F2 = 2, G = 4, N = 8;
    std::vector<Letter> all;
    for (Letter l = 0; l < 16; ++l) all.push_back(l);
    a.edges = {
        {0, 0, {N}}, {0, 1, {F1}}, {0, 2, {F2}}, {0, 4, {G}},
        {1, 1, {N, F1}}, {1, 3, {F2}}, {1, 4, {G}},
        {2, 2, {N, F2}}, {2, 3, {F1}}, {2, 4, {G}},
        {3, 3, all}, {4, 4, all},
    };
    a.eps.assign(5, {});
    a.acceptance = {{3}};
    a.in_qd = {false, false, false, true, true};
    a.compile();
    validate_ldba(a);
    return a;
}

}  // namespace

Ldba builtin_automaton(const std::string& name) {
    if (name == "fig3_reach_stay_safe") {
        return assemble({"t", "u"}, 3, 0,
                        {{0, "!u & !t", 0}, {0, "!u & t", 1}, {0, "u & !t", 2},
                         {1, "!u & t", 1}, {2, "true", 2}},
                        {}, {{1}}, {1, 2});
    }
    if (name == "fig4_fg_t") {
        return assemble({"t"}, 2, 0, {{0, "true", 0}, {1, "t", 1}}, {{0, 1}}, {{1}}, {1});
    }
    if (name == "fig5_sequenced") {
        return assemble({"p", "t", "u"}, 4, 0,
                        {{0, "!p & !u", 0}, {0, "p & !u", 1}, {0, "u", 3},
                         {1, "!t & !u", 1}, {1, "t & !u", 2}, {1, "u", 3},
                         {2, "t", 2}, {3, "u", 3}},
                        {}, {{2}}, {2, 3});
    }
    if (name == "fig6_pacman") return make_fig6();
    if (name == "fig10_gfa_gfb_gnc") {
        return assemble({"A", "B", "C"}, 3, 0,
                        {{0, "!B & !C", 1}, {0, "B & !A & !C", 2},
                         {1, "!B & !C", 1}, {1, "B & !A & !C", 2},
                         {2, "!A & !C", 2}, {2, "A & !C", 0}},
                        {}, {{0}}, {0, 1, 2});
    }
    throw UnknownNameError("unknown bundled automaton '" + name + "'");
}

std::vector<std::string> builtin_automaton_names() {
    return {"fig3_reach_stay_safe", "fig4_fg_t", "fig5_sequenced", "fig6_pacman",
            "fig10_gfa_gfb_gnc"};
}

std::string builtin_automaton_property(const std::string& name) {
    if (name == "fig3_reach_stay_safe") return "F t & G(t -> G t) & G(u -> G u)";
    if (name == "fig4_fg_t") return "F G t";
    if (name == "fig5_sequenced") return "F(p & F t) & G(t -> G t) & G(u -> G u)";
    if (name == "fig6_pacman") return "F((f1 & F f2) | (f2 & F f1)) & G(g -> G g)";
    if (name == "fig10_gfa_gfb_gnc") return "G F A & G F B & G !C";
    throw UnknownNameError("unknown bundled automaton '" + name + "'");
}

}  // namespace lcrl
