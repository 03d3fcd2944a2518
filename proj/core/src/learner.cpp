#include "lcrl/learner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <set>

namespace lcrl {

// ---------------------------------------------------------------------------
// Count tables

void CountTables::record(const ProductState& s, ActionId a, const ProductState& next) {
    Entry& e = table_[pack_product_action(s, a)];
    ++e.total;
    const std::uint64_t key = pack_product(next);
    auto it = std::find_if(e.succ.begin(), e.succ.end(),
                           [&](const auto& kv) { return kv.first == key; });
    if (e.total == 2) {
        // First real visit: successor count jumps to the pair count so the
        // estimated row is stochastic from the start.
        if (it == e.succ.end()) e.succ.emplace_back(key, 2);
        else it->second = 2;
    } else if (it == e.succ.end()) {
        e.succ.emplace_back(key, 1);
    } else {
        ++it->second;
    }
}

std::uint32_t CountTables::pair_count(const ProductState& s, ActionId a) const {
    const auto it = table_.find(pack_product_action(s, a));
    return it == table_.end() ? 1 : it->second.total;
}

std::uint32_t CountTables::trans_count(const ProductState& s, ActionId a,
                                       const ProductState& next) const {
    const Entry* e = entry(s, a);
    if (!e) return 0;
    const std::uint64_t key = pack_product(next);
    for (const auto& [k, n] : e->succ)
        if (k == key) return n;
    return 0;
}

double CountTables::estimate(const ProductState& s, ActionId a, const ProductState& next) const {
    return static_cast<double>(trans_count(s, a, next)) / pair_count(s, a);
}

const CountTables::Entry* CountTables::entry(const ProductState& s, ActionId a) const {
    const auto it = table_.find(pack_product_action(s, a));
    return it == table_.end() ? nullptr : &it->second;
}

void record_transition(CountTables& counts, const ProductState& s, ActionId a,
                       const ProductState& next) {
    counts.record(s, a, next);
}

// ---------------------------------------------------------------------------
// Parameters and tables

void LearnParams::validate() const {
    if (!(mu > 0.0 && mu <= 1.0)) throw ConfigError("mu", "must be in (0,1]");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("gamma", "must be in [0,1)");
    if (!(r_p > 0.0)) throw ConfigError("rp", "must be positive");
    if (episodes < 1) throw ConfigError("episodes", "must be >= 1");
    if (it_threshold < 1) throw ConfigError("it_threshold", "must be >= 1");
    if (!(epsilon0 >= 0.0 && epsilon0 <= 1.0)) throw ConfigError("epsilon0", "must be in [0,1]");
    if (convergence_window < 1) throw ConfigError("convergence_window", "must be >= 1");
    if (!(convergence_eps >= 0.0)) throw ConfigError("convergence_eps", "must be >= 0");
}

double LearnParams::effective_tau() const {
    return tau > 0.0 ? tau : std::max(1.0, episodes / 10.0);
}

double QTable::get(const ProductState& p, ActionId a) const {
    const auto it = q_.find(pack_product_action(p, a));
    return it == q_.end() ? 0.0 : it->second;
}

void QTable::set(const ProductState& p, ActionId a, double value) {
    q_[pack_product_action(p, a)] = value;
}

double QTable::max_over(const ProductState& p, const std::vector<ActionId>& actions) const {
    double best = 0.0;
    bool first = true;
    for (ActionId a : actions) {
        const double v = get(p, a);
        best = first ? v : std::max(best, v);
        first = false;
    }
    return first ? 0.0 : best;
}

ActionId QTable::argmax(const ProductState& p, const std::vector<ActionId>& actions) const {
    ActionId chosen = actions.front();
    double best = get(p, chosen);
    for (ActionId a : actions) {
        const double v = get(p, a);
        if (v > best) {
            best = v;
            chosen = a;
        }
    }
    return chosen;
}

std::vector<std::pair<std::uint64_t, double>> QTable::snapshot() const {
    std::vector<std::pair<std::uint64_t, double>> out(q_.begin(), q_.end());
    std::sort(out.begin(), out.end());
    return out;
}

double q_update(QTable& q, const ProductState& s, ActionId a, double reward,
                const ProductState& next, const std::vector<ActionId>& next_actions, double mu,
                double gamma) {
    const double old = q.get(s, a);
    const double value = old + mu * (reward + gamma * q.max_over(next, next_actions) - old);
    q.set(s, a, value);
    return value;
}

ActionId select_action(const QTable& q, const ProductState& s,
                       const std::vector<ActionId>& actions, double epsilon,
                       std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < epsilon) {
        std::uniform_int_distribution<std::size_t> pick(0, actions.size() - 1);
        return actions[pick(rng)];
    }
    return q.argmax(s, actions);
}

// ---------------------------------------------------------------------------
// Training loop

TrainResult train(const LabeledEnv& env, const Ldba& ldba, const LearnParams& params,
                  std::uint64_t seed, bool record_psp_trace) {
    params.validate();
    ProductContext ctx(env, ldba);
    const FrontierSet full_frontier = initial_frontier(ldba);
    const RewardParams rewards{params.r_p, 0.0};
    const double tau = params.effective_tau();
    const double bound = params.q_bound();

    std::mt19937_64 rng(seed);
    TrainResult result{QTable{}, CountTables{}, init_psp(ldba, ctx.sinks()), {}, {}, 0.0,
                       0.0,      0,             false,                       {}};
    std::set<std::uint64_t> visited;
    std::deque<double> window;

    for (int ep = 1; ep <= params.episodes; ++ep) {
        const auto t0 = std::chrono::steady_clock::now();
        ProductState p = ctx.initial();
        FrontierSet frontier = full_frontier;
        const double epsilon = params.epsilon0 / (1.0 + (ep - 1) / tau);

        EpisodeRecord rec;
        rec.episode = ep;
        rec.terminal = "threshold";
        double max_dq = 0.0;

        while (rec.iterations < params.it_threshold) {
            if (ctx.is_sink(p.aut)) {
                rec.terminal = "SINK";
                break;
            }
            ++rec.iterations;
            visited.insert(pack_product(p));

            const auto actions = ctx.available_actions(p);
            const ActionId a = select_action(result.q, p, actions, epsilon, rng);
            const ProductState next = ctx.step(p, a, rng);
            result.counts.record(p, a, next);

            const auto [reward, updated] =
                reward_and_update(ldba, next, frontier, rewards, ctx.is_eps_action(a));
            frontier = updated;
            rec.reward += reward;
            if (reward > 0.0 && rec.steps_to_target < 0) rec.steps_to_target = rec.iterations;

            const auto next_actions = ctx.available_actions(next);
            const double before = result.q.get(p, a);
            const double after =
                q_update(result.q, p, a, reward, next, next_actions, params.mu, params.gamma);
            max_dq = std::max(max_dq, std::abs(after - before));
            result.q_min = std::min(result.q_min, after);
            result.q_max = std::max(result.q_max, after);
            if (after < -1e-9 || after > bound + 1e-9) ++result.bound_violations;

            avi_update(result.psp, result.counts, ctx, p);
            p = next;
        }
        visited.insert(pack_product(p));

        rec.psp_initial = result.psp.get(ctx.initial());
        rec.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
        result.log.push_back(rec);

        if (record_psp_trace) {
            std::vector<std::pair<std::uint64_t, double>> snap;
            snap.reserve(visited.size());
            for (std::uint64_t key : visited)
                snap.emplace_back(key, result.psp.get(unpack_product(key)));
            result.psp_trace.push_back(std::move(snap));
        }

        window.push_back(max_dq);
        if (static_cast<int>(window.size()) > params.convergence_window) window.pop_front();
        if (static_cast<int>(window.size()) == params.convergence_window &&
            *std::max_element(window.begin(), window.end()) < params.convergence_eps) {
            result.converged_early = true;
            break;
        }
    }

    result.visited.assign(visited.begin(), visited.end());
    return result;
}

// ---------------------------------------------------------------------------
// Evaluation

EvalStats evaluate_policy(const std::function<ActionId(const ProductState&)>& policy,
                          const LabeledEnv& env, const Ldba& ldba, int n_runs, int horizon,
                          std::uint64_t seed) {
    if (n_runs < 1) throw ConfigError("eval_runs", "must be >= 1");
    ProductContext ctx(env, ldba);
    const int f = ldba.num_acceptance_sets();
    EvalStats stats;
    stats.runs = n_runs;
    std::mt19937_64 rng(seed);
    for (int run = 0; run < n_runs; ++run) {
        ProductState p = ctx.initial();
        std::vector<char> seen(f, 0);
        bool sunk = false;
        for (int step = 0; step < horizon; ++step) {
            if (ctx.is_sink(p.aut)) {
                sunk = true;
                break;
            }
            p = ctx.step(p, policy(p), rng);
            if (step >= horizon / 2 && p.aut < ldba.num_states())
                for (int j = 0; j < f; ++j)
                    if (ldba.is_accepting(p.aut, j)) seen[j] = 1;
        }
        const bool all = std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
        if (!sunk && all) ++stats.satisfied;
    }
    stats.fraction = static_cast<double>(stats.satisfied) / stats.runs;
    return stats;
}

}  // namespace lcrl
