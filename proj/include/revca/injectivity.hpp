#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "revca/oracle.hpp"
#include "revca/rule.hpp"
#include "revca/surjectivity.hpp"
#include "revca/tuple_set.hpp"
#include "revca/verdict.hpp"

namespace revca {

struct InjectivityOptions {
    // Injective implies surjective implies balanced, so unbalanced rules may
    // skip the tree. Off by default so conformance tests exercise the tree's
    // own Garden-of-Eden path; surveys turn it on.
    bool unbalanced_shortcut = false;
    // Diagnostic: ignore periodic-pair terminations and keep growing the tree
    // until a Garden-of-Eden or exhaustion.
    bool continue_past_periodic = false;
    std::uint64_t memory_budget_bytes = UINT64_MAX;
};

namespace detail {

enum class PairTreeTermination { exhausted, empty_node, periodic_pair, out_of_memory };

struct PairTreeRun {
    PairTreeTermination termination = PairTreeTermination::exhausted;
    std::int64_t terminal = -1;
    std::vector<SearchNode> nodes;
    TreeStats stats;
    std::uint64_t bytes_peak = 0;
};

// Breadth-first tree over (2m-2)-wide pair tuples (initial left window,
// current right window). The root holds every duplicated (m-1)-tuple; a
// child keeps the left half and advances the right half by one cell.
// Terminations: an empty node is a Garden-of-Eden; a non-root node holding
// two or more self-overlapping tuples yields a periodic predecessor pair.
inline PairTreeRun run_pair_tree(const Rule& r, const InjectivityOptions& opts) {
    const std::uint32_t p = r.alphabet, m = r.window_size();
    const std::uint64_t half = checked_pow(p, m - 1);
    const std::uint64_t universe = half * half;
    const std::uint64_t tail_mod = checked_pow(p, m - 2);

    PairTreeRun run;
    TupleSet root(universe);
    for (std::uint64_t u = 0; u < half; ++u) root.insert(u * half + u);
    root.finalize();
    std::uint64_t bytes = root.memory_bytes();
    run.stats.nodes_created = 1;
    run.stats.tuples = root.size();
    run.nodes.push_back(SearchNode{std::move(root), -1, 0, 0});

    NodeDedup dedup;
    std::deque<std::size_t> queue;
    queue.push_back(0);
    while (!queue.empty()) {
        const std::size_t idx = queue.front();
        queue.pop_front();
        const SearchNode& node = run.nodes[idx];

        if (node.set.empty()) {
            run.termination = PairTreeTermination::empty_node;
            run.terminal = static_cast<std::int64_t>(idx);
            return run;
        }
        if (node.depth >= 1 && !opts.continue_past_periodic) {
            // Root tuples are all self-overlapping by construction, and one
            // self-overlapping tuple per node is the path's own predecessor;
            // only two or more terminate.
            std::uint32_t periodic = 0;
            node.set.for_each([&](std::uint64_t code) {
                if (code / half == code % half) ++periodic;
            });
            if (periodic >= 2) {
                run.termination = PairTreeTermination::periodic_pair;
                run.terminal = static_cast<std::int64_t>(idx);
                return run;
            }
        }
        if (!dedup.insert_if_new(run.nodes, idx)) continue;
        bytes += 48;
        ++run.stats.nodes_expanded;

        std::vector<TupleSet> children;
        children.reserve(p);
        for (std::uint32_t b = 0; b < p; ++b) children.emplace_back(universe);
        node.set.for_each([&](std::uint64_t code) {
            const std::uint64_t left = code / half;
            const std::uint64_t right = code % half;
            for (std::uint32_t d = 0; d < p; ++d) {
                children[r.table[right * p + d]].insert(left * half +
                                                        (right % tail_mod) * p + d);
            }
        });
        const std::uint32_t depth = node.depth + 1;
        for (std::uint32_t b = 0; b < p; ++b) {
            children[b].finalize();
            bytes += children[b].memory_bytes() + sizeof(SearchNode);
            run.stats.tuples += children[b].size();
            ++run.stats.nodes_created;
            run.nodes.push_back(SearchNode{std::move(children[b]),
                                           static_cast<std::int64_t>(idx), b, depth});
            queue.push_back(run.nodes.size() - 1);
        }
        if (bytes > run.bytes_peak) run.bytes_peak = bytes;
        if (bytes > opts.memory_budget_bytes) {
            run.termination = PairTreeTermination::out_of_memory;
            return run;
        }
    }
    if (bytes > run.bytes_peak) run.bytes_peak = bytes;
    return run;
}

} // namespace detail

// Rebuilds the two distinct periodic predecessors behind a periodic-pair
// termination: each self-overlapping tuple (u, u) at depth n is the trace of
// an n-periodic word whose windows spell the node's path.
inline PeriodicPairWitness extract_periodic_witness(const std::vector<SearchNode>& nodes,
                                                    std::size_t index, const Rule& r) {
    const std::uint32_t p = r.alphabet, m = r.window_size();
    const std::uint64_t half = checked_pow(p, m - 1);
    const std::uint64_t tail_mod = checked_pow(p, m - 2);
    const SearchNode& node = nodes[index];
    if (node.depth == 0) throw std::logic_error("periodic witness requires a non-root node");

    std::vector<std::uint64_t> periodic;
    node.set.for_each([&](std::uint64_t code) {
        if (code / half == code % half && periodic.size() < 2) periodic.push_back(code);
    });
    if (periodic.size() < 2) {
        throw std::logic_error("periodic witness requires two self-overlapping tuples");
    }

    std::vector<std::size_t> chain;  // root..node
    for (std::int64_t at = static_cast<std::int64_t>(index); at >= 0; at = nodes[at].parent) {
        chain.push_back(static_cast<std::size_t>(at));
    }
    std::reverse(chain.begin(), chain.end());
    const std::uint32_t n = node.depth;

    auto rebuild = [&](std::uint64_t member) {
        const std::uint64_t left = member / half;
        std::uint64_t right = member % half;
        Word digits(n, 0);
        for (std::uint32_t level = n; level >= 1; --level) {
            const std::uint32_t label = nodes[chain[level]].edge;
            const Digit d = static_cast<Digit>(right % p);
            bool found = false;
            for (std::uint32_t a = 0; a < p && !found; ++a) {
                const std::uint64_t prev = a * tail_mod + right / p;
                if (r.table[prev * p + d] == label &&
                    nodes[chain[level - 1]].set.contains(left * half + prev)) {
                    digits[level - 1] = d;
                    right = prev;
                    found = true;
                }
            }
            if (!found) throw std::logic_error("periodic witness trace broke");
        }
        if (right != left) throw std::logic_error("periodic witness trace did not close");
        Word word = index_to_word(left, m - 1, p);
        word.insert(word.end(), digits.begin(), digits.end());
        return Word(word.begin(), word.begin() + n);  // n-periodic predecessor
    };

    PeriodicPairWitness w;
    w.predecessor_a = rebuild(periodic[0]);
    w.predecessor_b = rebuild(periodic[1]);
    w.tuple_a = index_to_word(periodic[0], 2 * (m - 1), p);
    w.tuple_b = index_to_word(periodic[1], 2 * (m - 1), p);
    for (std::uint32_t label : node_path_labels(nodes, index)) {
        w.path.push_back(static_cast<Digit>(label));
    }
    w.image = apply_global(r, w.predecessor_a, Boundary::periodic());
    if (w.predecessor_a == w.predecessor_b ||
        apply_global(r, w.predecessor_b, Boundary::periodic()) != w.image) {
        throw std::logic_error("periodic witness construction is inconsistent");
    }
    return w;
}

namespace detail {

inline Verdict width_one_injectivity(const Rule& r, Property property, Boundary boundary) {
    Verdict v{property, std::move(boundary), true, {}, {}, {}};
    std::vector<std::int64_t> first(r.alphabet, -1);
    for (std::uint64_t t = 0; t < r.table.size(); ++t) {
        if (first[r.table[t]] >= 0) {
            v.holds = false;
            PeriodicPairWitness w;
            w.predecessor_a = {static_cast<Digit>(first[r.table[t]])};
            w.predecessor_b = {static_cast<Digit>(t)};
            w.image = {r.table[t]};
            w.path = w.image;
            v.witness = std::move(w);
            break;
        }
        first[r.table[t]] = static_cast<std::int64_t>(t);
    }
    return v;
}

} // namespace detail

// Global injectivity (equivalently, reversibility under the periodic
// boundary) via the pair-tuple tree.
inline Verdict decide_injective_global(const Rule& r, const InjectivityOptions& opts = {}) {
    if (r.window_size() == 1) {
        return detail::width_one_injectivity(r, Property::injective, Boundary::unbounded());
    }
    if (opts.unbalanced_shortcut && !is_balanced(r)) {
        return Verdict{Property::injective, Boundary::unbounded(), false, {}, {},
                       "unbalanced rule (not surjective, hence not injective)"};
    }
    auto run = detail::run_pair_tree(r, opts);
    Verdict v{Property::injective, Boundary::unbounded(), false, {}, run.stats, {}};
    switch (run.termination) {
        case detail::PairTreeTermination::exhausted:
            v.holds = true;
            break;
        case detail::PairTreeTermination::empty_node:
            v.witness = GardenOfEdenWitness{extract_garden_of_eden(
                run.nodes, static_cast<std::size_t>(run.terminal))};
            v.note = "garden of eden: not surjective, hence not injective";
            break;
        case detail::PairTreeTermination::periodic_pair:
            v.witness = extract_periodic_witness(run.nodes,
                                                 static_cast<std::size_t>(run.terminal), r);
            break;
        case detail::PairTreeTermination::out_of_memory:
            throw budget_error("injectivity tree exceeded the memory budget");
    }
    return v;
}

// Surjectivity for every length under the periodic boundary. Bounded
// surjectivity and injectivity coincide length by length, and periodic
// injectivity for all lengths coincides with global injectivity, so this is
// the same tree; a periodic-pair termination at length n already implies a
// missed image at length n by counting. The diagnostic flag preserves the
// Garden-of-Eden-only reading for comparison.
inline Verdict decide_surjective_periodic(const Rule& r, const InjectivityOptions& opts = {}) {
    if (r.window_size() == 1) {
        return detail::decide_width_one(r, Property::surjective, Boundary::periodic());
    }
    if (opts.unbalanced_shortcut && !is_balanced(r)) {
        return Verdict{Property::surjective, Boundary::periodic(), false, {}, {},
                       "unbalanced rule (not surjective)"};
    }
    auto run = detail::run_pair_tree(r, opts);
    Verdict v{Property::surjective, Boundary::periodic(), false, {}, run.stats, {}};
    switch (run.termination) {
        case detail::PairTreeTermination::exhausted:
            v.holds = true;
            if (opts.continue_past_periodic) {
                v.note = "diagnostic mode: garden-of-eden scan only";
            }
            break;
        case detail::PairTreeTermination::empty_node:
            v.witness = GardenOfEdenWitness{extract_garden_of_eden(
                run.nodes, static_cast<std::size_t>(run.terminal))};
            break;
        case detail::PairTreeTermination::periodic_pair:
            v.witness = extract_periodic_witness(run.nodes,
                                                 static_cast<std::size_t>(run.terminal), r);
            v.note = "two predecessors collide at this length, so some image is missed";
            break;
        case detail::PairTreeTermination::out_of_memory:
            throw budget_error("injectivity tree exceeded the memory budget");
    }
    return v;
}

// Injectivity under a bounded boundary. Periodic delegates to the global
// tree; fixed and reflective coincide with the matching surjectivity
// decision, with the witness re-derived as a colliding pair at the witness
// length.
inline Verdict decide_injective_bounded(const Rule& r, const Boundary& b,
                                        const InjectivityOptions& opts = {},
                                        bool derive_collision = true) {
    if (b.kind == Boundary::Kind::unbounded) {
        throw std::invalid_argument("bounded injectivity requires a bounded boundary");
    }
    if (b.kind == Boundary::Kind::periodic) {
        Verdict v = decide_injective_global(r, opts);
        v.boundary = b;
        return v;
    }
    Verdict v = (b.kind == Boundary::Kind::fixed)
                    ? decide_surjective_fixed(r, b.left_fill, b.right_fill)
                    : decide_surjective_reflective(r);
    v.property = Property::injective;
    if (!v.holds && derive_collision) {
        if (const auto* goe = std::get_if<GardenOfEdenWitness>(&v.witness)) {
            const std::uint32_t n = static_cast<std::uint32_t>(goe->word.size());
            auto check = oracle_injective_bounded(r, b, n);
            if (check.holds) throw std::logic_error("no collision at a non-surjective length");
            v.witness = CollisionWitness{check.collision->first, check.collision->second,
                                         apply_global(r, check.collision->first, b)};
        }
    }
    return v;
}

// Diagnostic search for two words of length >= 2m-1 agreeing on their outer
// m-1 cells on both sides with equal image. Exists only for non-surjective
// rules, so it can come back empty even when the rule is not injective.
inline std::optional<ReplaceableWitness> find_replaceable_pair(const Rule& r) {
    const Verdict v = decide_injective_global(r);
    if (v.holds) return std::nullopt;
    const std::uint32_t p = r.alphabet, m = r.window_size();

    std::uint32_t witness_len = m;
    if (const auto* pw = std::get_if<PeriodicPairWitness>(&v.witness)) {
        witness_len = static_cast<std::uint32_t>(pw->predecessor_a.size());
    } else if (const auto* goe = std::get_if<GardenOfEdenWitness>(&v.witness)) {
        witness_len = static_cast<std::uint32_t>(goe->word.size());
    }
    const std::uint32_t lo = 2 * m - 1;
    const std::uint32_t hi = lo + std::max(witness_len, m);

    for (std::uint32_t len = lo; len <= hi; ++len) {
        std::uint64_t space;
        try {
            space = checked_pow(p, len, std::uint64_t{1} << 22);
        } catch (const std::overflow_error&) {
            break;  // search bound reached, treat as not found
        }
        // Bucket words by (left m-1 cells, right m-1 cells, sliding image).
        std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> buckets;
        for (std::uint64_t widx = 0; widx < space; ++widx) {
            Word w = index_to_word(widx, len, p);
            Word image = local_image(r, w);
            std::uint64_t h = 0xcbf29ce484222325ull;
            auto mix = [&h](std::uint64_t x) {
                h ^= x;
                h *= 0x100000001b3ull;
            };
            for (std::size_t i = 0; i + 1 < m; ++i) mix(w[i]);
            for (std::size_t i = len - (m - 1); i < len; ++i) mix(w[i]);
            mix(word_to_index(image, p));
            auto& bucket = buckets[h];
            for (std::uint64_t prev : bucket) {
                Word other = index_to_word(prev, len, p);
                bool match = local_image(r, other) == image;
                for (std::size_t i = 0; match && i + 1 < m; ++i) {
                    match = other[i] == w[i] && other[len - 1 - i] == w[len - 1 - i];
                }
                if (match) return ReplaceableWitness{std::move(other), std::move(w)};
            }
            bucket.push_back(widx);
        }
    }
    return std::nullopt;
}

} // namespace revca
