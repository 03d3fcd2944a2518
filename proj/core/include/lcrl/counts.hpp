#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "lcrl/product.hpp"

namespace lcrl {

// Visit counters backing the maximum-likelihood transition estimate
// P(s,a,s') ~ trans/pair. Pair counts start at one; the first recorded
// visit writes its successor count as two, which makes the estimated row
// sum to exactly one from then on.
class CountTables {
public:
    struct Entry {
        std::uint32_t total = 1;  // pair count
        std::vector<std::pair<std::uint64_t, std::uint32_t>> succ;  // packed state -> count
    };

    void record(const ProductState& s, ActionId a, const ProductState& next);

    std::uint32_t pair_count(const ProductState& s, ActionId a) const;
    std::uint32_t trans_count(const ProductState& s, ActionId a, const ProductState& next) const;
    double estimate(const ProductState& s, ActionId a, const ProductState& next) const;

    // nullptr when the pair was never really visited.
    const Entry* entry(const ProductState& s, ActionId a) const;

    std::size_t num_pairs() const { return table_.size(); }

private:
    std::unordered_map<std::uint64_t, Entry> table_;
};

}  // namespace lcrl
