#include "lcrl/psp.hpp"

#include <algorithm>
#include <cmath>

namespace lcrl {

PspTable::PspTable(const Ldba& ldba, const std::vector<int>& sinks) {
    sink_flags_.assign(ldba.num_states() + 1, 0);
    for (int q : sinks) sink_flags_[q] = 1;
    sink_flags_[ldba.num_states()] = 1;  // reject
}

PspTable init_psp(const Ldba& ldba, const std::vector<int>& sinks) {
    return PspTable(ldba, sinks);
}

bool PspTable::pinned(int aut_state) const { return sink_flags_[aut_state] != 0; }

double PspTable::get(const ProductState& p) const {
    if (pinned(p.aut)) return 0.0;
    const auto it = values_.find(pack_product(p));
    return it == values_.end() ? 1.0 : it->second;
}

void PspTable::set(const ProductState& p, double value) {
    if (pinned(p.aut)) return;
    values_[pack_product(p)] = value;
}

std::vector<std::pair<std::uint64_t, double>> PspTable::snapshot() const {
    std::vector<std::pair<std::uint64_t, double>> out(values_.begin(), values_.end());
    std::sort(out.begin(), out.end());
    return out;
}

double avi_update(PspTable& psp, const CountTables& counts, const ProductContext& ctx,
                  const ProductState& p) {
    if (psp.pinned(p.aut)) return 0.0;
    const double current = psp.get(p);
    double best = 0.0;
    bool any_action = false;
    for (ActionId a : ctx.available_actions(p)) {
        any_action = true;
        const CountTables::Entry* e = counts.entry(p, a);
        double value;
        if (e == nullptr || e->succ.empty()) {
            value = current;  // untried action: no update contribution
        } else {
            value = 0.0;
            for (const auto& [key, n] : e->succ)
                value += (static_cast<double>(n) / e->total) * psp.get(unpack_product(key));
        }
        best = std::max(best, value);
    }
    if (!any_action) return current;
    psp.set(p, best);
    return best;
}

int psp_sweeps_to_fixpoint(PspTable& psp, const CountTables& counts, const ProductContext& ctx,
                           const std::vector<ProductState>& states, double tol, int max_sweeps) {
    for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
        double delta = 0.0;
        for (const auto& p : states) {
            if (psp.pinned(p.aut)) continue;
            const double before = psp.get(p);
            const double after = avi_update(psp, counts, ctx, p);
            delta = std::max(delta, std::abs(after - before));
        }
        if (delta < tol) return sweep;
    }
    throw NonConvergenceError("count-model value iteration did not converge");
}

std::vector<double> psp_fixed_point(const ExplicitProduct& p, const std::vector<char>& pinned_zero,
                                    double tol, int max_sweeps) {
    std::vector<double> v(p.total, 1.0);
    for (int x = 0; x < p.total; ++x)
        if (pinned_zero[x]) v[x] = 0.0;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double delta = 0.0;
        for (int x = 0; x < p.total; ++x) {
            if (pinned_zero[x]) continue;
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
    throw NonConvergenceError("satisfaction-probability iteration did not converge");
}

}  // namespace lcrl
