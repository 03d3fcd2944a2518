#include "lcrl/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>

#include "lcrl/detail/scc.hpp"

namespace lcrl {

const std::vector<std::pair<int, double>>& ExplicitProduct::row(int x, ActionId a) const {
    const auto& acts = actions[x];
    for (std::size_t i = 0; i < acts.size(); ++i)
        if (acts[i] == a) return rows[x][i];
    throw InvalidActionError("action " + std::to_string(a) + " not available in product state " +
                             std::to_string(x));
}

std::string ExplicitProduct::action_name(ActionId a, const Ldba& ldba) const {
    if (a < num_env_actions) return action_names[a];
    const int q = a - num_env_actions;
    return q == n_q ? "halt" : "eps_" + ldba.state_names[q];
}

ExplicitProduct build_product(const ExplicitMdp& mdp, const Ldba& ldba) {
    if (static_cast<std::int64_t>(mdp.n_states) * ldba.num_states() > 1000000)
        throw TooLargeError("product would exceed 10^6 states");

    Ldba compiled = ldba;
    compiled.compile();
    const auto proj = compiled.projection_table(mdp.ap);

    ExplicitProduct p;
    p.n_env = mdp.n_states;
    p.n_q = ldba.num_states();
    p.n_pairs = p.n_env * p.n_q;
    p.reject = p.n_pairs;
    p.total = p.n_pairs + 1;
    p.initial = p.pair_index(mdp.initial, ldba.initial);
    p.num_env_actions = static_cast<int>(mdp.action_names.size());
    p.num_acceptance_sets = ldba.num_acceptance_sets();
    p.action_names = mdp.action_names;
    p.env_labels = mdp.labels;

    p.acc_q.assign(p.num_acceptance_sets, std::vector<char>(p.n_q + 1, 0));
    for (int j = 0; j < p.num_acceptance_sets; ++j)
        for (int q : ldba.acceptance[j]) p.acc_q[j][q] = 1;

    p.actions.resize(p.total);
    p.rows.resize(p.total);
    for (int s = 0; s < p.n_env; ++s) {
        for (int q = 0; q < p.n_q; ++q) {
            const int x = p.pair_index(s, q);
            for (std::size_t ai = 0; ai < mdp.actions[s].size(); ++ai) {
                std::map<int, double> mass;
                for (const auto& [s2, prob] : mdp.rows[s][ai]) {
                    const int q2 = compiled.step(q, proj[mdp.labels[s2]]);
                    mass[q2 < 0 ? p.reject : p.pair_index(s2, q2)] += prob;
                }
                p.actions[x].push_back(mdp.actions[s][ai]);
                p.rows[x].emplace_back(mass.begin(), mass.end());
            }
            for (int q2 : ldba.eps[q]) {
                p.actions[x].push_back(p.num_env_actions + q2);
                p.rows[x].push_back({{p.pair_index(s, q2), 1.0}});
            }
        }
    }
    p.actions[p.reject].push_back(p.num_env_actions + p.n_q);
    p.rows[p.reject].push_back({{p.reject, 1.0}});

    p.reachable.assign(p.total, 0);
    std::queue<int> bfs;
    bfs.push(p.initial);
    p.reachable[p.initial] = 1;
    while (!bfs.empty()) {
        const int x = bfs.front();
        bfs.pop();
        for (const auto& row : p.rows[x])
            for (const auto& [y, prob] : row)
                if (prob > 0 && !p.reachable[y]) {
                    p.reachable[y] = 1;
                    bfs.push(y);
                }
    }
    return p;
}

// ---------------------------------------------------------------------------
// End components

std::vector<Mec> mec_decomposition(const ExplicitProduct& p) {
    std::vector<std::vector<char>> allowed(p.total);
    for (int x = 0; x < p.total; ++x) allowed[x].assign(p.actions[x].size(), 1);
    std::vector<char> active(p.total, 1);

    bool changed = true;
    std::vector<int> comp(p.total, -1);
    while (changed) {
        changed = false;
        std::vector<std::vector<int>> adj(p.total);
        for (int x = 0; x < p.total; ++x) {
            if (!active[x]) continue;
            for (std::size_t ai = 0; ai < p.rows[x].size(); ++ai) {
                if (!allowed[x][ai]) continue;
                for (const auto& [y, prob] : p.rows[x][ai])
                    if (prob > 0) adj[x].push_back(y);
            }
        }
        const auto scc = detail::tarjan_scc(adj);
        comp = scc.comp;
        for (int x = 0; x < p.total; ++x) {
            if (!active[x]) continue;
            bool any = false;
            for (std::size_t ai = 0; ai < p.rows[x].size(); ++ai) {
                if (!allowed[x][ai]) continue;
                bool inside = true;
                for (const auto& [y, prob] : p.rows[x][ai])
                    if (prob > 0 && (!active[y] || comp[y] != comp[x])) inside = false;
                if (!inside) {
                    allowed[x][ai] = 0;
                    changed = true;
                }
                any = any || allowed[x][ai];
            }
            if (!any) {
                active[x] = 0;
                changed = true;
            }
        }
    }

    std::map<int, Mec> by_comp;
    for (int x = 0; x < p.total; ++x) {
        if (!active[x]) continue;
        Mec& m = by_comp[comp[x]];
        m.states.push_back(x);
        std::vector<ActionId> acts;
        for (std::size_t ai = 0; ai < p.actions[x].size(); ++ai)
            if (allowed[x][ai]) acts.push_back(p.actions[x][ai]);
        m.allowed.push_back(std::move(acts));
    }

    std::vector<Mec> out;
    for (auto& [id, m] : by_comp) {
        m.accepting = true;
        for (int j = 0; j < p.num_acceptance_sets; ++j) {
            bool hit = false;
            for (int x : m.states) hit = hit || p.accepting(x, j);
            m.accepting = m.accepting && hit;
        }
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<char> accepting_mec_union(const ExplicitProduct& p, const std::vector<Mec>& mecs) {
    std::vector<char> target(p.total, 0);
    for (const auto& m : mecs)
        if (m.accepting)
            for (int x : m.states) target[x] = 1;
    return target;
}

std::vector<char> prob0_states(const ExplicitProduct& p, const std::vector<char>& target) {
    // Least fixpoint of "some action may reach the target".
    std::vector<char> can_reach(target.begin(), target.end());
    bool changed = true;
    while (changed) {
        changed = false;
        for (int x = 0; x < p.total; ++x) {
            if (can_reach[x]) continue;
            for (const auto& row : p.rows[x]) {
                for (const auto& [y, prob] : row)
                    if (prob > 0 && can_reach[y]) {
                        can_reach[x] = 1;
                        changed = true;
                        break;
                    }
                if (can_reach[x]) break;
            }
        }
    }
    std::vector<char> out(p.total);
    for (int x = 0; x < p.total; ++x) out[x] = !can_reach[x];
    return out;
}

std::vector<double> max_reach_probability(const ExplicitProduct& p,
                                          const std::vector<char>& target, double tol,
                                          int max_sweeps) {
    std::vector<double> v(p.total, 0.0);
    for (int x = 0; x < p.total; ++x)
        if (target[x]) v[x] = 1.0;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double delta = 0.0;
        for (int x = 0; x < p.total; ++x) {
            if (target[x]) continue;
            double best = 0.0;
            for (const auto& row : p.rows[x]) {
                double sum = 0.0;
                for (const auto& [y, prob] : row) sum += prob * v[y];
                best = std::max(best, sum);
            }
            delta = std::max(delta, std::abs(best - v[x]));
            v[x] = best;
        }
        if (delta < tol) return v;
    }
    throw NonConvergenceError("reachability value iteration did not converge");
}

std::vector<double> bellman_apply(const ExplicitProduct& p, const std::vector<double>& v) {
    std::vector<double> out(p.total, 0.0);
    for (int x = 0; x < p.total; ++x) {
        double best = 0.0;
        bool first = true;
        for (const auto& row : p.rows[x]) {
            double sum = 0.0;
            for (const auto& [y, prob] : row) sum += prob * v[y];
            best = first ? sum : std::max(best, sum);
            first = false;
        }
        out[x] = best;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Policy extraction

namespace {

// BFS distances toward a target set along positive-probability edges,
// optionally restricted to a state set / allowed actions.
std::vector<int> distances_to(const ExplicitProduct& p, const std::vector<char>& target,
                              const std::vector<char>* restrict_states,
                              const std::map<int, std::vector<ActionId>>* restrict_actions) {
    // Reverse adjacency on the fly: forward BFS layer by layer.
    std::vector<int> dist(p.total, -1);
    std::queue<int> q;
    for (int x = 0; x < p.total; ++x)
        if (target[x] && (!restrict_states || (*restrict_states)[x])) {
            dist[x] = 0;
            q.push(x);
        }
    // Precompute reverse edges.
    std::vector<std::vector<int>> rev(p.total);
    for (int x = 0; x < p.total; ++x) {
        if (restrict_states && !(*restrict_states)[x]) continue;
        const std::vector<ActionId>* acts = nullptr;
        if (restrict_actions) {
            const auto it = restrict_actions->find(x);
            if (it == restrict_actions->end()) continue;
            acts = &it->second;
        }
        for (std::size_t ai = 0; ai < p.actions[x].size(); ++ai) {
            if (acts && std::find(acts->begin(), acts->end(), p.actions[x][ai]) == acts->end())
                continue;
            for (const auto& [y, prob] : p.rows[x][ai])
                if (prob > 0 && (!restrict_states || (*restrict_states)[y])) rev[y].push_back(x);
        }
    }
    while (!q.empty()) {
        const int x = q.front();
        q.pop();
        for (int w : rev[x])
            if (dist[w] == -1) {
                dist[w] = dist[x] + 1;
                q.push(w);
            }
    }
    return dist;
}

}  // namespace

std::vector<ActionId> optimal_policy_from_values(const ExplicitProduct& p,
                                                 const std::vector<double>& values,
                                                 const std::vector<Mec>& mecs) {
    const auto target = accepting_mec_union(p, mecs);
    const auto dist = distances_to(p, target, nullptr, nullptr);
    std::vector<ActionId> policy(p.total, -1);

    for (int x = 0; x < p.total; ++x) {
        if (target[x]) continue;  // handled by the in-component sweep below
        double best = -1.0;
        int best_dist = -1;
        ActionId chosen = p.actions[x].front();
        for (std::size_t ai = 0; ai < p.actions[x].size(); ++ai) {
            double sum = 0.0;
            int step_dist = -1;
            for (const auto& [y, prob] : p.rows[x][ai]) {
                sum += prob * values[y];
                if (prob > 0 && dist[y] >= 0 && (step_dist == -1 || dist[y] < step_dist))
                    step_dist = dist[y];
            }
            const bool better =
                sum > best + 1e-12 ||
                (sum > best - 1e-12 && step_dist != -1 &&
                 (best_dist == -1 || step_dist < best_dist));
            if (better) {
                best = std::max(best, sum);
                best_dist = step_dist;
                chosen = p.actions[x][ai];
            }
        }
        policy[x] = chosen;
    }

    // Inside each accepting component: head for the next owed acceptance
    // set along shortest internal paths.
    for (const auto& m : mecs) {
        if (!m.accepting) continue;
        std::vector<char> inside(p.total, 0);
        std::map<int, std::vector<ActionId>> allowed;
        for (std::size_t i = 0; i < m.states.size(); ++i) {
            inside[m.states[i]] = 1;
            allowed[m.states[i]] = m.allowed[i];
        }
        const int f = p.num_acceptance_sets;
        // Distance tables toward each acceptance set inside the component.
        std::vector<std::vector<int>> dist_to_set(f);
        for (int j = 0; j < f; ++j) {
            std::vector<char> set_target(p.total, 0);
            for (int x : m.states)
                if (p.accepting(x, j)) set_target[x] = 1;
            dist_to_set[j] = distances_to(p, set_target, &inside, &allowed);
        }
        for (std::size_t i = 0; i < m.states.size(); ++i) {
            const int x = m.states[i];
            int owed = 0;  // next set this state should head for
            for (int j = 0; j < f; ++j)
                if (p.accepting(x, j)) owed = (j + 1) % f;
            const auto& d = dist_to_set[owed];
            ActionId chosen = m.allowed[i].front();
            int best = -1;
            for (ActionId a : m.allowed[i]) {
                const auto& row = p.row(x, a);
                int step = -1;
                for (const auto& [y, prob] : row)
                    if (prob > 0 && d[y] >= 0 && (step == -1 || d[y] < step)) step = d[y];
                if (step != -1 && (best == -1 || step < best)) {
                    best = step;
                    chosen = a;
                }
            }
            policy[x] = chosen;
        }
    }
    return policy;
}

// ---------------------------------------------------------------------------
// Induced chain analysis

ChainAnalysis chain_analysis(const ExplicitProduct& p, const std::function<ActionId(int)>& policy,
                             double tol) {
    // Restrict to states reachable under the policy.
    std::vector<char> reach(p.total, 0);
    std::vector<ActionId> act(p.total, -1);
    std::queue<int> bfs;
    bfs.push(p.initial);
    reach[p.initial] = 1;
    while (!bfs.empty()) {
        const int x = bfs.front();
        bfs.pop();
        act[x] = policy(x);
        for (const auto& [y, prob] : p.row(x, act[x]))
            if (prob > 0 && !reach[y]) {
                reach[y] = 1;
                bfs.push(y);
            }
    }

    std::vector<std::vector<int>> adj(p.total);
    for (int x = 0; x < p.total; ++x) {
        if (!reach[x]) continue;
        for (const auto& [y, prob] : p.row(x, act[x]))
            if (prob > 0) adj[x].push_back(y);
    }
    const auto scc = detail::tarjan_scc(adj);

    ChainAnalysis out;
    std::vector<int> class_of(p.total, -1);
    std::vector<char> accepting_state(p.total, 0);
    for (const auto& members : scc.members) {
        if (!reach[members.front()]) continue;
        bool closed = true;
        for (int x : members)
            for (int y : adj[x])
                if (scc.comp[y] != scc.comp[x]) closed = false;
        if (!closed) {
            for (int x : members) out.transient.push_back(x);
            continue;
        }
        std::vector<int> cls(members.begin(), members.end());
        std::sort(cls.begin(), cls.end());
        int met = 0;
        bool accepting = true;
        for (int j = 0; j < p.num_acceptance_sets; ++j) {
            bool hit = false;
            for (int x : cls) hit = hit || p.accepting(x, j);
            met += hit ? 1 : 0;
            accepting = accepting && hit;
        }
        out.closeness = std::max(out.closeness, met);
        if (accepting)
            for (int x : cls) accepting_state[x] = 1;
        for (int x : cls) class_of[x] = static_cast<int>(out.recurrent_classes.size());
        out.recurrent_classes.push_back(std::move(cls));
        out.class_accepting.push_back(accepting);
    }
    std::sort(out.transient.begin(), out.transient.end());

    // Absorption probability into accepting classes.
    std::vector<double> v(p.total, 0.0);
    for (int x = 0; x < p.total; ++x)
        if (accepting_state[x]) v[x] = 1.0;
    for (int sweep = 0; sweep < 1000000; ++sweep) {
        double delta = 0.0;
        for (int x : out.transient) {
            double sum = 0.0;
            for (const auto& [y, prob] : p.row(x, act[x])) sum += prob * v[y];
            delta = std::max(delta, std::abs(sum - v[x]));
            v[x] = sum;
        }
        if (delta < tol) break;
        if (sweep + 1 == 1000000)
            throw NonConvergenceError("absorption probabilities did not converge");
    }
    out.satisfaction_probability = v[p.initial];
    return out;
}

int max_closeness(const ExplicitProduct& p, const std::vector<Mec>& mecs) {
    int best = 0;
    for (const auto& m : mecs) {
        bool reachable = false;
        for (int x : m.states) reachable = reachable || p.reachable[x];
        if (!reachable) continue;
        int met = 0;
        for (int j = 0; j < p.num_acceptance_sets; ++j) {
            bool hit = false;
            for (int x : m.states) hit = hit || p.accepting(x, j);
            met += hit ? 1 : 0;
        }
        best = std::max(best, met);
    }
    return best;
}

OracleReport oracle_solve(const ExplicitProduct& p) {
    OracleReport r;
    r.mecs = mec_decomposition(p);
    for (const auto& m : r.mecs) r.amec_count += m.accepting ? 1 : 0;
    const auto target = accepting_mec_union(p, r.mecs);
    r.values = max_reach_probability(p, target);
    r.value_at_initial = r.values[p.initial];
    r.policy = optimal_policy_from_values(p, r.values, r.mecs);
    return r;
}

}  // namespace lcrl
