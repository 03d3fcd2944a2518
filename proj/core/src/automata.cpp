#include "lcrl/automata.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <bit>
#include <optional>
#include <sstream>

#include "lcrl/detail/scc.hpp"

namespace lcrl {

// ---------------------------------------------------------------------------
// Ldba basics

void Ldba::compile() {
    const int nl = num_letters();
    delta_.assign(static_cast<std::size_t>(num_states()) * nl, -1);
    for (const auto& e : edges) {
        for (Letter l : e.letters) {
            int& slot = delta_[e.from * nl + l];
            if (slot != -1 && slot != e.to)
                throw NotLimitDeterministicError(
                    "overlapping transitions from state '" + state_names[e.from] +
                    "' on letter " + render_letters({l}, ap));
            slot = e.to;
        }
    }
}

bool Ldba::is_accepting(int q, int j) const {
    const auto& f = acceptance[j];
    return std::binary_search(f.begin(), f.end(), q);
}

bool Ldba::is_accepting_any(int q) const {
    for (int j = 0; j < num_acceptance_sets(); ++j)
        if (is_accepting(q, j)) return true;
    return false;
}

Letter Ldba::project(const std::vector<std::string>& host_ap, std::uint32_t host_labels) const {
    Letter out = 0;
    for (std::size_t i = 0; i < ap.size(); ++i) {
        auto it = std::find(host_ap.begin(), host_ap.end(), ap[i]);
        if (it == host_ap.end()) continue;
        if (host_labels & (1u << (it - host_ap.begin()))) out |= 1u << i;
    }
    return out;
}

std::vector<Letter> Ldba::projection_table(const std::vector<std::string>& host_ap) const {
    std::vector<Letter> table(std::size_t{1} << host_ap.size());
    for (std::uint32_t l = 0; l < table.size(); ++l) table[l] = project(host_ap, l);
    return table;
}

// ---------------------------------------------------------------------------
// Validation

PartitionReport validate_ldba(const Ldba& a) {
    const int n = a.num_states();
    if (n == 0) throw Error("automaton has no states");
    if (a.initial < 0 || a.initial >= n) throw Error("initial state out of range");
    if (static_cast<int>(a.in_qd.size()) != n) throw Error("partition flags missing");
    if (a.acceptance.empty()) throw Error("automaton needs at least one acceptance set");

    // Recompiling checks reading determinism and letter ranges.
    Ldba copy = a;
    copy.compile();

    PartitionReport report;
    report.num_acceptance_sets = a.num_acceptance_sets();
    for (int q = 0; q < n; ++q) (a.in_qd[q] ? report.q_d : report.q_n).push_back(q);

    for (int j = 0; j < a.num_acceptance_sets(); ++j)
        for (int q : a.acceptance[j])
            if (q < 0 || q >= n || !a.in_qd[q])
                throw AcceptanceOutsideQDError("acceptance set F" + std::to_string(j + 1) +
                                               " contains state '" + a.state_names[q] +
                                               "' outside the deterministic part");

    for (int q = 0; q < n; ++q) {
        if (a.in_qd[q] && !a.eps[q].empty())
            throw EpsilonInAcceptingError("state '" + a.state_names[q] +
                                          "' in the deterministic part has epsilon moves");
        for (int t : a.eps[q])
            if (t < 0 || t >= n) throw Error("epsilon target out of range");
    }

    for (const auto& e : a.edges) {
        if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n)
            throw Error("transition endpoint out of range");
        if (a.in_qd[e.from] && !a.in_qd[e.to])
            throw NotLimitDeterministicError("state '" + a.state_names[e.from] +
                                             "' leaves the deterministic part on letter " +
                                             render_letters({e.letters.front()}, a.ap));
    }

    // Reachability of Q_D (either part may be empty).
    std::vector<char> seen(n, 0);
    std::queue<int> bfs;
    bfs.push(a.initial);
    seen[a.initial] = 1;
    while (!bfs.empty()) {
        const int q = bfs.front();
        bfs.pop();
        if (a.in_qd[q]) report.qd_reachable = true;
        auto visit = [&](int t) {
            if (t >= 0 && !seen[t]) {
                seen[t] = 1;
                bfs.push(t);
            }
        };
        for (Letter l = 0; l < static_cast<Letter>(copy.num_letters()); ++l) visit(copy.step(q, l));
        for (int t : a.eps[q]) visit(t);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Accepting frontier

bool FrontierSet::contains(int q) const {
    return std::binary_search(states.begin(), states.end(), q);
}

FrontierSet initial_frontier(const Ldba& a) {
    std::set<int> u;
    for (const auto& f : a.acceptance) u.insert(f.begin(), f.end());
    return {{u.begin(), u.end()}};
}

FrontierSet accepting_frontier(const Ldba& a, int q, const FrontierSet& frontier) {
    std::set<int> removed;
    for (int j = 0; j < a.num_acceptance_sets(); ++j)
        if (a.is_accepting(q, j)) removed.insert(a.acceptance[j].begin(), a.acceptance[j].end());
    if (removed.empty()) return frontier;

    auto minus = [&](const std::vector<int>& base) {
        FrontierSet out;
        for (int s : base)
            if (!removed.count(s)) out.states.push_back(s);
        return out;
    };

    FrontierSet next = minus(frontier.states);
    if (!next.states.empty()) return next;
    FrontierSet all = initial_frontier(a);
    next = minus(all.states);
    if (!next.states.empty()) return next;
    return all;  // single acceptance set: restart the round
}

// ---------------------------------------------------------------------------
// Sinks

std::vector<int> find_sinks(const Ldba& a) {
    Ldba copy = a;
    copy.compile();
    const int n = a.num_states();

    std::vector<std::vector<int>> adj(n);
    for (int q = 0; q < n; ++q) {
        std::set<int> succ;
        for (Letter l = 0; l < static_cast<Letter>(copy.num_letters()); ++l) {
            const int t = copy.step(q, l);
            if (t >= 0) succ.insert(t);
        }
        succ.insert(a.eps[q].begin(), a.eps[q].end());
        adj[q].assign(succ.begin(), succ.end());
    }

    const auto scc = detail::tarjan_scc(adj);
    std::vector<int> sinks;
    for (const auto& comp : scc.members) {
        bool closed = true;
        for (int q : comp)
            for (int t : adj[q])
                if (scc.comp[t] != scc.comp[q]) closed = false;
        if (!closed) continue;
        bool misses_some_set = false;
        for (const auto& f : a.acceptance) {
            bool hit = false;
            for (int q : comp)
                if (std::binary_search(f.begin(), f.end(), q)) hit = true;
            if (!hit) misses_some_set = true;
        }
        if (misses_some_set) sinks.insert(sinks.end(), comp.begin(), comp.end());
    }
    std::sort(sinks.begin(), sinks.end());
    return sinks;
}

// ---------------------------------------------------------------------------
// Lasso acceptance

bool accepts_lasso(const Ldba& a, const LassoWord& w) {
    Ldba copy = a;
    copy.compile();
    const auto proj = copy.projection_table(w.alphabet);

    const int nq = a.num_states();
    const std::size_t p = w.prefix.size();
    const std::size_t n = p + w.cycle.size();
    if (w.cycle.empty()) throw InvalidLengthError("lasso cycle must be nonempty");
    auto letter = [&](std::size_t i) { return proj[i < p ? w.prefix[i] : w.cycle[i - p]]; };
    auto node = [&](std::size_t i, int q) { return static_cast<int>(i) * nq + q; };

    // Product of the lasso graph with the automaton. Reading edges advance
    // the position; epsilon edges stay on it.
    const int total = static_cast<int>(n) * nq;
    std::vector<std::vector<int>> adj(total);
    std::vector<std::vector<int>> read_succ(total);  // reading edges only
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t ni = (i + 1 < n) ? i + 1 : p;
        for (int q = 0; q < nq; ++q) {
            const int t = copy.step(q, letter(i));
            if (t >= 0) {
                adj[node(i, q)].push_back(node(ni, t));
                read_succ[node(i, q)].push_back(node(ni, t));
            }
            for (int e : a.eps[q]) adj[node(i, q)].push_back(node(i, e));
        }
    }

    // Reachability from the initial configuration.
    std::vector<char> reach(total, 0);
    std::queue<int> bfs;
    bfs.push(node(0, a.initial));
    reach[node(0, a.initial)] = 1;
    while (!bfs.empty()) {
        const int v = bfs.front();
        bfs.pop();
        for (int t : adj[v])
            if (!reach[t]) {
                reach[t] = 1;
                bfs.push(t);
            }
    }

    const auto scc = detail::tarjan_scc(adj);
    const int f = a.num_acceptance_sets();
    for (std::size_t c = 0; c < scc.members.size(); ++c) {
        const auto& comp = scc.members[c];
        bool reachable = false, consumes = false;
        std::vector<char> hits(f, 0);
        for (int v : comp) {
            if (reach[v]) reachable = true;
            const int q = v % nq;
            for (int j = 0; j < f; ++j)
                if (a.is_accepting(q, j)) hits[j] = 1;
            for (int t : read_succ[v])
                if (scc.comp[t] == static_cast<int>(c)) consumes = true;
        }
        if (!reachable || !consumes) continue;
        if (std::all_of(hits.begin(), hits.end(), [](char h) { return h != 0; })) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Label expressions

namespace {

bool is_boolean(const LtlPtr& f) {
    switch (f->kind) {
        case LtlKind::True:
        case LtlKind::Atom: return true;
        case LtlKind::Not: return is_boolean(f->lhs);
        case LtlKind::And:
        case LtlKind::Or: return is_boolean(f->lhs) && is_boolean(f->rhs);
        default: return false;
    }
}

bool eval_boolean(const LtlPtr& f, Letter l, const std::vector<std::string>& ap) {
    switch (f->kind) {
        case LtlKind::True: return true;
        case LtlKind::Atom: {
            const auto it = std::find(ap.begin(), ap.end(), f->atom);
            return (l >> (it - ap.begin())) & 1u;
        }
        case LtlKind::Not: return !eval_boolean(f->lhs, l, ap);
        case LtlKind::And: return eval_boolean(f->lhs, l, ap) && eval_boolean(f->rhs, l, ap);
        case LtlKind::Or: return eval_boolean(f->lhs, l, ap) || eval_boolean(f->rhs, l, ap);
        default: return false;
    }
}

}  // namespace

std::vector<Letter> compile_label(const std::string& expr, const std::vector<std::string>& ap) {
    const LtlPtr f = parse_ltl(expr, ap);
    if (!is_boolean(f)) throw Error("temporal operator in transition label: " + expr);
    std::vector<Letter> out;
    for (Letter l = 0; l < (1u << ap.size()); ++l)
        if (eval_boolean(f, l, ap)) out.push_back(l);
    return out;
}

namespace {

// Cube over the alphabet: letter matches iff (letter & care) == value.
struct Cube {
    Letter care;
    Letter value;
    bool operator<(const Cube& o) const {
        return care != o.care ? care < o.care : value < o.value;
    }
    bool operator==(const Cube& o) const { return care == o.care && value == o.value; }
};

}  // namespace

std::string render_letters(const std::vector<Letter>& letters, const std::vector<std::string>& ap) {
    if (letters.empty()) return "false";
    const Letter full = static_cast<Letter>((1u << ap.size()) - 1);

    std::set<Cube> cubes;
    for (Letter l : letters) cubes.insert({full, l});

    // Merge cubes differing in exactly one cared bit until stable.
    bool merged = true;
    while (merged) {
        merged = false;
        std::set<Cube> next;
        std::set<Cube> used;
        std::vector<Cube> list(cubes.begin(), cubes.end());
        for (std::size_t i = 0; i < list.size(); ++i) {
            for (std::size_t j = i + 1; j < list.size(); ++j) {
                if (list[i].care != list[j].care) continue;
                const Letter diff = list[i].value ^ list[j].value;
                if (diff == 0 || (diff & (diff - 1)) != 0) continue;
                next.insert({static_cast<Letter>(list[i].care & ~diff),
                             static_cast<Letter>(list[i].value & ~diff)});
                used.insert(list[i]);
                used.insert(list[j]);
                merged = true;
            }
        }
        for (const Cube& c : cubes)
            if (!used.count(c)) next.insert(c);
        cubes = std::move(next);
    }

    // Greedy cover of the letter set by the merged cubes, biggest first.
    std::set<Letter> remaining(letters.begin(), letters.end());
    std::vector<Cube> order(cubes.begin(), cubes.end());
    std::sort(order.begin(), order.end(), [](const Cube& a, const Cube& b) {
        const int ca = std::popcount(a.care), cb = std::popcount(b.care);
        return ca != cb ? ca < cb : a < b;
    });
    std::vector<Cube> chosen;
    for (const Cube& c : order) {
        bool useful = false;
        for (Letter l : letters)
            if ((l & c.care) == c.value && remaining.count(l)) useful = true;
        if (!useful) continue;
        chosen.push_back(c);
        for (Letter l : letters)
            if ((l & c.care) == c.value) remaining.erase(l);
        if (remaining.empty()) break;
    }

    std::string out;
    for (std::size_t i = 0; i < chosen.size(); ++i) {
        if (i) out += " | ";
        const Cube& c = chosen[i];
        if (c.care == 0) {
            out += "true";
            continue;
        }
        bool first = true;
        for (std::size_t b = 0; b < ap.size(); ++b) {
            if (!(c.care & (1u << b))) continue;
            if (!first) out += " & ";
            first = false;
            if (!(c.value & (1u << b))) out += '!';
            out += ap[b];
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

Ldba load_automaton(const std::string& text) {
    Ldba a;
    std::map<std::string, int> state_index;
    bool have_alphabet = false, have_states = false, have_initial = false;
    bool have_part_n = false, have_part_d = false;
    std::vector<char> qd_flag;
    // Letter -> line that defined it, per state, for overlap reporting.
    std::vector<std::map<Letter, int>> owner;

    auto state_of = [&](const std::string& name, int line) {
        auto it = state_index.find(name);
        if (it == state_index.end()) throw FormatError(line, "unknown state '" + name + "'");
        return it->second;
    };

    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        const auto colon = line.find(':');
        if (colon == std::string::npos) throw FormatError(line_no, "expected 'key: value'");
        const std::string key = trim(line.substr(0, colon));
        const std::string rest = trim(line.substr(colon + 1));

        if (key == "alphabet") {
            a.ap = split_ws(rest);
            have_alphabet = true;
        } else if (key == "states") {
            if (!have_alphabet) throw FormatError(line_no, "alphabet must precede states");
            a.state_names = split_ws(rest);
            if (a.state_names.empty()) throw FormatError(line_no, "empty state list");
            for (std::size_t i = 0; i < a.state_names.size(); ++i) {
                if (!state_index.emplace(a.state_names[i], static_cast<int>(i)).second)
                    throw FormatError(line_no, "duplicate state '" + a.state_names[i] + "'");
            }
            a.eps.assign(a.state_names.size(), {});
            qd_flag.assign(a.state_names.size(), 0);
            owner.assign(a.state_names.size(), {});
            have_states = true;
        } else if (key == "initial") {
            if (!have_states) throw FormatError(line_no, "states must precede initial");
            a.initial = state_of(rest, line_no);
            have_initial = true;
        } else if (key == "partN" || key == "partD") {
            if (!have_states) throw FormatError(line_no, "states must precede partition");
            for (const auto& name : split_ws(rest)) qd_flag[state_of(name, line_no)] = key == "partD" ? 1 : 0;
            (key == "partN" ? have_part_n : have_part_d) = true;
        } else if (key == "acc") {
            if (!have_states) throw FormatError(line_no, "states must precede acceptance");
            const auto eq = rest.find('=');
            if (eq == std::string::npos) throw FormatError(line_no, "expected 'acc: Fj = states'");
            std::vector<int> f;
            for (const auto& name : split_ws(rest.substr(eq + 1))) f.push_back(state_of(name, line_no));
            std::sort(f.begin(), f.end());
            a.acceptance.push_back(std::move(f));
        } else if (key == "trans") {
            if (!have_states) throw FormatError(line_no, "states must precede transitions");
            const auto sep1 = rest.find("--");
            const auto sep2 = rest.rfind("-->");
            if (sep1 == std::string::npos || sep2 == std::string::npos || sep2 <= sep1)
                throw FormatError(line_no, "expected 'trans: q -- label --> q'");
            const int from = state_of(trim(rest.substr(0, sep1)), line_no);
            const int to = state_of(trim(rest.substr(sep2 + 3)), line_no);
            const std::string label = trim(rest.substr(sep1 + 2, sep2 - sep1 - 2));
            std::vector<Letter> letters;
            try {
                letters = compile_label(label, a.ap);
            } catch (const Error& e) {
                throw FormatError(line_no, std::string("bad label: ") + e.what());
            }
            for (Letter l : letters) {
                auto [it, fresh] = owner[from].emplace(l, line_no);
                if (!fresh)
                    throw FormatError(line_no, "transition overlaps line " +
                                                   std::to_string(it->second) + " on letter " +
                                                   render_letters({l}, a.ap));
            }
            a.edges.push_back({from, to, std::move(letters)});
        } else if (key == "eps") {
            if (!have_states) throw FormatError(line_no, "states must precede epsilon moves");
            const auto sep = rest.find("-->");
            if (sep == std::string::npos) throw FormatError(line_no, "expected 'eps: q --> q'");
            const int from = state_of(trim(rest.substr(0, sep)), line_no);
            const int to = state_of(trim(rest.substr(sep + 3)), line_no);
            a.eps[from].push_back(to);
        } else {
            throw FormatError(line_no, "unknown key '" + key + "'");
        }
    }

    if (!have_alphabet) throw FormatError(line_no, "missing 'alphabet:' line");
    if (!have_states) throw FormatError(line_no, "missing 'states:' line");
    if (!have_initial) throw FormatError(line_no, "missing 'initial:' line");
    if (!have_part_n && !have_part_d) throw FormatError(line_no, "missing partition lines");
    if (a.acceptance.empty()) throw FormatError(line_no, "missing 'acc:' line");

    a.in_qd.assign(qd_flag.begin(), qd_flag.end());
    for (auto& e : a.eps) {
        std::sort(e.begin(), e.end());
        e.erase(std::unique(e.begin(), e.end()), e.end());
    }
    a.compile();
    validate_ldba(a);
    return a;
}

std::string save_automaton(const Ldba& a) {
    std::ostringstream out;
    out << "alphabet:";
    for (const auto& s : a.ap) out << ' ' << s;
    out << "\nstates:";
    for (const auto& s : a.state_names) out << ' ' << s;
    out << "\ninitial: " << a.state_names[a.initial] << "\npartN:";
    for (int q = 0; q < a.num_states(); ++q)
        if (!a.in_qd[q]) out << ' ' << a.state_names[q];
    out << "\npartD:";
    for (int q = 0; q < a.num_states(); ++q)
        if (a.in_qd[q]) out << ' ' << a.state_names[q];
    out << '\n';
    for (int j = 0; j < a.num_acceptance_sets(); ++j) {
        out << "acc: F" << (j + 1) << " =";
        for (int q : a.acceptance[j]) out << ' ' << a.state_names[q];
        out << '\n';
    }
    // Letters grouped per (from, to) pair.
    std::map<std::pair<int, int>, std::vector<Letter>> grouped;
    for (const auto& e : a.edges) {
        auto& v = grouped[{e.from, e.to}];
        v.insert(v.end(), e.letters.begin(), e.letters.end());
    }
    for (auto& [key, letters] : grouped) {
        std::sort(letters.begin(), letters.end());
        letters.erase(std::unique(letters.begin(), letters.end()), letters.end());
        out << "trans: " << a.state_names[key.first] << " -- " << render_letters(letters, a.ap)
            << " --> " << a.state_names[key.second] << '\n';
    }
    for (int q = 0; q < a.num_states(); ++q)
        for (int t : a.eps[q]) out << "eps: " << a.state_names[q] << " --> " << a.state_names[t] << '\n';
    return out.str();
}

bool ldba_equal(const Ldba& a, const Ldba& b) {
    if (a.ap != b.ap || a.state_names != b.state_names || a.initial != b.initial) return false;
    if (a.in_qd != b.in_qd || a.acceptance != b.acceptance || a.eps != b.eps) return false;
    Ldba ca = a, cb = b;
    ca.compile();
    cb.compile();
    for (int q = 0; q < a.num_states(); ++q)
        for (Letter l = 0; l < static_cast<Letter>(ca.num_letters()); ++l)
            if (ca.step(q, l) != cb.step(q, l)) return false;
    return true;
}

}  // namespace lcrl
