#pragma once

#include <functional>
#include <string>

#include "lcrl/counts.hpp"
#include "lcrl/product.hpp"
#include "lcrl/psp.hpp"

namespace lcrl {

struct LearnParams {
    double mu = 0.9;
    double gamma = 0.9;
    double r_p = 1.0;
    int episodes = 100;
    int it_threshold = 1000;
    double epsilon0 = 1.0;
    double tau = 0.0;  // <= 0 picks episodes / 10
    int convergence_window = 30;
    double convergence_eps = 1e-4;

    void validate() const;  // throws ConfigError naming the bad field
    double effective_tau() const;
    double q_bound() const { return r_p / (1.0 - gamma); }
};

// Action-value table over product states; missing entries read as zero.
class QTable {
public:
    double get(const ProductState& p, ActionId a) const;
    void set(const ProductState& p, ActionId a, double value);
    double max_over(const ProductState& p, const std::vector<ActionId>& actions) const;
    // Lowest action id wins ties.
    ActionId argmax(const ProductState& p, const std::vector<ActionId>& actions) const;

    std::size_t size() const { return q_.size(); }
    std::vector<std::pair<std::uint64_t, double>> snapshot() const;  // sorted by key

private:
    std::unordered_map<std::uint64_t, double> q_;
};

// One tabular update; returns the new value.
double q_update(QTable& q, const ProductState& s, ActionId a, double reward,
                const ProductState& next, const std::vector<ActionId>& next_actions, double mu,
                double gamma);

// Epsilon-greedy over the available actions.
ActionId select_action(const QTable& q, const ProductState& s,
                       const std::vector<ActionId>& actions, double epsilon,
                       std::mt19937_64& rng);

// Ledger of transition counts with the first-visit correction.
void record_transition(CountTables& counts, const ProductState& s, ActionId a,
                       const ProductState& next);

struct EpisodeRecord {
    int episode = 0;
    int iterations = 0;
    double reward = 0.0;
    std::string terminal;     // "SINK" or "threshold"
    int steps_to_target = -1; // iteration of the first positive reward
    double psp_initial = 0.0;
    double wall_ms = 0.0;
};

struct TrainResult {
    QTable q;
    CountTables counts;
    PspTable psp;
    std::vector<EpisodeRecord> log;
    std::vector<std::uint64_t> visited;  // sorted packed product states
    double q_min = 0.0;
    double q_max = 0.0;
    int bound_violations = 0;
    bool converged_early = false;
    // Per-episode PSP snapshots over visited states, when requested.
    std::vector<std::vector<std::pair<std::uint64_t, double>>> psp_trace;

    PspTable release_psp() { return std::move(psp); }
};

// Episodic Q-learning over the on-the-fly product with frontier rewards,
// visit counting and one interleaved PSP update per step. Stops early once
// the largest Q change over the sliding window falls below the threshold.
TrainResult train(const LabeledEnv& env, const Ldba& ldba, const LearnParams& params,
                  std::uint64_t seed, bool record_psp_trace = false);

// Greedy readout of a Q table; total on all product states.
class GreedyPolicy {
public:
    GreedyPolicy(const QTable& q, const ProductContext& ctx) : q_(&q), ctx_(&ctx) {}
    ActionId operator()(const ProductState& p) const {
        return q_->argmax(p, ctx_->available_actions(p));
    }

private:
    const QTable* q_;
    const ProductContext* ctx_;
};

struct EvalStats {
    int runs = 0;
    int satisfied = 0;
    double fraction = 0.0;
};

// Monte-Carlo proxy for the satisfaction probability of a policy: a run
// counts once every acceptance set is visited during its second half and
// the run has not fallen into a sink.
EvalStats evaluate_policy(const std::function<ActionId(const ProductState&)>& policy,
                          const LabeledEnv& env, const Ldba& ldba, int n_runs, int horizon,
                          std::uint64_t seed);

}  // namespace lcrl
