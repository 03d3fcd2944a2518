#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "lcrl/ltl.hpp"

namespace lcrl::testing {

// Random formula over the full surface syntax, for round-trip and
// desugaring properties.
inline LtlPtr random_formula(const std::vector<std::string>& alphabet, int depth,
                             std::mt19937_64& rng) {
    std::uniform_int_distribution<int> kind(0, depth <= 0 ? 1 : 9);
    switch (kind(rng)) {
        case 0: return ltl_true();
        case 1: {
            std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
            return ltl_atom(alphabet[pick(rng)]);
        }
        case 2: return ltl_not(random_formula(alphabet, depth - 1, rng));
        case 3: return ltl_next(random_formula(alphabet, depth - 1, rng));
        case 4: return ltl_eventually(random_formula(alphabet, depth - 1, rng));
        case 5: return ltl_always(random_formula(alphabet, depth - 1, rng));
        case 6:
            return ltl_and(random_formula(alphabet, depth - 1, rng),
                           random_formula(alphabet, depth - 1, rng));
        case 7:
            return ltl_or(random_formula(alphabet, depth - 1, rng),
                          random_formula(alphabet, depth - 1, rng));
        case 8:
            return ltl_implies(random_formula(alphabet, depth - 1, rng),
                               random_formula(alphabet, depth - 1, rng));
        default:
            return ltl_until(random_formula(alphabet, depth - 1, rng),
                             random_formula(alphabet, depth - 1, rng));
    }
}

// Word sampler restricted to what a given fixture can emit: letters from a
// fixed universe, trap atoms that hold forever once seen, and atoms that
// occur at most once per word.
struct WordShape {
    std::vector<std::string> alphabet;
    std::vector<std::uint32_t> universe;
    std::vector<std::string> absorbing;
    std::vector<std::string> at_most_once;
    std::uint32_t fallback = 0;  // letter standing in for stripped occurrences
};

inline std::uint32_t shape_bit(const WordShape& shape, const std::string& atom) {
    const auto it = std::find(shape.alphabet.begin(), shape.alphabet.end(), atom);
    return 1u << (it - shape.alphabet.begin());
}

inline LassoWord sample_shaped_lasso(const WordShape& shape, std::size_t prefix_len,
                                     std::size_t cycle_len, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, shape.universe.size() - 1);
    LassoWord w;
    w.alphabet = shape.alphabet;
    for (std::size_t i = 0; i < prefix_len; ++i) w.prefix.push_back(shape.universe[pick(rng)]);
    for (std::size_t i = 0; i < cycle_len; ++i) w.cycle.push_back(shape.universe[pick(rng)]);

    // Atoms that may occur at most once: keep the first prefix occurrence,
    // replace everything later with the fallback letter (cycle letters
    // repeat forever, so they can never carry such an atom).
    for (const auto& atom : shape.at_most_once) {
        const std::uint32_t bit = shape_bit(shape, atom);
        bool seen = false;
        for (auto& l : w.prefix) {
            if (l & bit) {
                if (seen) l = shape.fallback;
                seen = true;
            }
        }
        for (auto& l : w.cycle)
            if (l & bit) l = shape.fallback;
    }

    // Trap atoms hold forever once seen. A trap inside the cycle collapses
    // the word to prefix . seen-part . {atom}^omega.
    for (const auto& atom : shape.absorbing) {
        const std::uint32_t bit = shape_bit(shape, atom);
        bool seen = false;
        for (auto& l : w.prefix) {
            if (seen) l = bit;
            if (l & bit) {
                l = bit;
                seen = true;
            }
        }
        if (seen) {
            w.cycle.assign(1, bit);
            continue;
        }
        for (std::size_t i = 0; i < w.cycle.size(); ++i) {
            if (w.cycle[i] & bit) {
                for (std::size_t j = 0; j <= i; ++j) w.prefix.push_back(w.cycle[j]);
                w.prefix.back() = bit;
                w.cycle.assign(1, bit);
                break;
            }
        }
    }
    return w;
}

}  // namespace lcrl::testing
