#include "lcrl/env.hpp"

#include <cmath>

namespace lcrl {

const std::vector<std::pair<int, double>>& ExplicitMdp::row(int s, ActionId a) const {
    const auto& acts = actions[s];
    for (std::size_t i = 0; i < acts.size(); ++i)
        if (acts[i] == a) return rows[s][i];
    throw InvalidActionError("action " + std::to_string(a) + " not available in state " +
                             std::to_string(s));
}

std::vector<std::string> LabeledEnv::label_names(EnvState s) const {
    std::vector<std::string> out;
    const std::uint32_t mask = labels(s);
    for (std::size_t i = 0; i < ap().size(); ++i)
        if (mask & (1u << i)) out.push_back(ap()[i]);
    return out;
}

ExplicitMdp explicit_mdp(const LabeledEnv& env) {
    if (!env.is_enumerable()) throw NotEnumerableError("environment is not enumerable");
    const int n = env.num_states();
    if (n > 200000) throw TooLargeError("environment has " + std::to_string(n) + " states");

    ExplicitMdp m;
    m.n_states = n;
    m.initial = static_cast<int>(env.reset());
    m.ap = env.ap();
    m.action_names = env.action_names();
    m.labels.resize(n);
    m.actions.resize(n);
    m.rows.resize(n);
    for (int s = 0; s < n; ++s) {
        m.labels[s] = env.labels(s);
        m.actions[s] = env.actions(s);
        for (ActionId a : m.actions[s]) {
            auto row = env.transition_row(s, a);
            std::vector<std::pair<int, double>> cast;
            double total = 0;
            for (const auto& [next, p] : row) {
                cast.emplace_back(static_cast<int>(next), p);
                total += p;
            }
            if (std::abs(total - 1.0) > 1e-12)
                throw Error("transition row does not sum to 1 at state " + std::to_string(s));
            m.rows[s].push_back(std::move(cast));
        }
    }
    return m;
}

}  // namespace lcrl
