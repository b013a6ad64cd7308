#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "revca/rule.hpp"

namespace revca {

enum class Property { surjective, injective };

inline std::string property_to_string(Property p) {
    return p == Property::surjective ? "surjective" : "injective";
}

// A successor word with no predecessor. For the unbounded (global) map the
// word has no preimage window of length |word| + m - 1; for a bounded
// boundary no configuration of length |word| maps onto it.
struct GardenOfEdenWitness {
    Word word;
};

// Two distinct cyclic predecessors of the same image under the periodic
// boundary, derived from two periodic (2m-2)-tuples on the same tree path.
struct PeriodicPairWitness {
    Word predecessor_a;
    Word predecessor_b;
    Word image;    // apply_global(pred, periodic) for both predecessors
    Word tuple_a;  // width 2m-2, left half equals right half
    Word tuple_b;
    Word path;     // successor labels from the root to the terminating node
};

// Two distinct bounded configurations with the same image.
struct CollisionWitness {
    Word predecessor_a;
    Word predecessor_b;
    Word image;
};

// Two distinct local configurations of length >= 2m-1 agreeing on their
// outer m-1 cells on both sides, with equal sliding image.
struct ReplaceableWitness {
    Word word_a;
    Word word_b;
};

using Witness = std::variant<std::monostate, GardenOfEdenWitness, PeriodicPairWitness,
                             CollisionWitness, ReplaceableWitness>;

inline bool has_witness(const Witness& w) {
    return !std::holds_alternative<std::monostate>(w);
}

struct TreeStats {
    std::uint64_t nodes_created = 0;
    std::uint64_t nodes_expanded = 0;
    std::uint64_t tuples = 0;  // total tuples across all created nodes
};

struct Verdict {
    Property property = Property::surjective;
    Boundary boundary;
    bool holds = false;
    Witness witness;  // engaged on most negative verdicts
    TreeStats stats;
    std::string note;
};

} // namespace revca
