#pragma once

#include <map>
#include <unordered_map>

#include "lcrl/counts.hpp"
#include "lcrl/oracle.hpp"
#include "lcrl/product.hpp"

namespace lcrl {

// Running estimate of the probability of satisfying the property from each
// product state. States whose automaton component is a sink (or the reject
// state) are pinned at zero; everything else starts optimistically at one.
class PspTable {
public:
    PspTable(const Ldba& ldba, const std::vector<int>& sinks);

    bool pinned(int aut_state) const;
    double get(const ProductState& p) const;
    void set(const ProductState& p, double value);

    // Sorted (packed state, value) view of everything explicitly stored.
    std::vector<std::pair<std::uint64_t, double>> snapshot() const;

private:
    std::vector<char> sink_flags_;  // indexed by automaton state, reject last
    std::unordered_map<std::uint64_t, double> values_;
};

PspTable init_psp(const Ldba& ldba, const std::vector<int>& sinks);

// One Gauss-Seidel update at state p against the count model. Actions that
// were never really tried contribute the state's current value, so an
// unexplored state is not zeroed spuriously. Returns the new value.
double avi_update(PspTable& psp, const CountTables& counts, const ProductContext& ctx,
                  const ProductState& p);

// Repeated full sweeps of avi_update over `states` until the largest change
// drops below tol. Returns the number of sweeps.
int psp_sweeps_to_fixpoint(PspTable& psp, const CountTables& counts, const ProductContext& ctx,
                           const std::vector<ProductState>& states, double tol,
                           int max_sweeps = 100000);

// Standalone solver on an explicit product, from above (all ones) with the
// given states pinned at zero. With the pin set covering everything that
// cannot reach an accepting component, the fixpoint is the exact maximal
// satisfaction probability.
std::vector<double> psp_fixed_point(const ExplicitProduct& p, const std::vector<char>& pinned_zero,
                                    double tol = 1e-6, int max_sweeps = 100000);

}  // namespace lcrl
