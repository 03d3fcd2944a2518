#include "lcrl/product.hpp"

#include <algorithm>

namespace lcrl {

ProductContext::ProductContext(const LabeledEnv& env, const Ldba& ldba)
    : env_(&env), ldba_(&ldba), compiled_(ldba) {
    compiled_.compile();
    projection_ = compiled_.projection_table(env.ap());
    sinks_ = find_sinks(ldba);
}

bool ProductContext::is_sink(int q) const {
    return q == reject_state() || std::binary_search(sinks_.begin(), sinks_.end(), q);
}

std::string ProductContext::action_name(ActionId a) const {
    if (!is_eps_action(a)) return env_->action_names()[a];
    const int q = eps_target(a);
    if (q == reject_state()) return "halt";
    return "eps_" + ldba_->state_names[q];
}

std::vector<ActionId> ProductContext::available_actions(const ProductState& p) const {
    if (p.aut == reject_state()) return {eps_action(reject_state())};  // absorbing self-loop
    std::vector<ActionId> out = env_->actions(p.env);
    for (int q : ldba_->eps[p.aut]) out.push_back(eps_action(q));
    return out;
}

int ProductContext::read(int q, EnvState env_next) const {
    if (q == reject_state()) return q;
    const Letter l = projection_[env_->labels(env_next)];
    const int t = compiled_.step(q, l);
    return t < 0 ? reject_state() : t;
}

ProductState ProductContext::step(const ProductState& p, ActionId a, std::mt19937_64& rng) const {
    if (p.aut == reject_state()) {
        if (a != eps_action(reject_state())) throw InvalidActionError("reject state only halts");
        return p;
    }
    if (is_eps_action(a)) {
        const int target = eps_target(a);
        const auto& eps = ldba_->eps[p.aut];
        if (std::find(eps.begin(), eps.end(), target) == eps.end())
            throw InvalidActionError("no epsilon move to state " + std::to_string(target));
        return {p.env, target};  // environment untouched, no label read
    }
    const EnvState next = env_->step(p.env, a, rng);
    return {next, read(p.aut, next)};
}

std::pair<double, FrontierSet> reward_and_update(const Ldba& ldba, const ProductState& p_next,
                                                 const FrontierSet& frontier,
                                                 const RewardParams& params, bool via_epsilon) {
    if (via_epsilon || p_next.aut >= ldba.num_states())
        return {params.r_n, frontier};
    const double reward = frontier.contains(p_next.aut) ? params.r_p : params.r_n;
    return {reward, accepting_frontier(ldba, p_next.aut, frontier)};
}

}  // namespace lcrl
