#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "revca/rule.hpp"
#include "revca/tuple_set.hpp"
#include "revca/verdict.hpp"

namespace revca {

// Root restriction and terminal acceptance set for a bounded surjectivity
// tree. Both hold (L+R)-wide tuples: the first and last L+R cells of a
// candidate extended preimage.
struct BoundarySets {
    TupleSet initial;
    TupleSet terminal;
};

inline BoundarySets build_boundary_sets(const Rule& r, const Boundary& b) {
    const std::uint32_t L = r.left_radius, R = r.right_radius, p = r.alphabet;
    const std::uint64_t universe = checked_pow(p, L + R);
    TupleSet initial(universe), terminal(universe);

    if (b.kind == Boundary::Kind::fixed) {
        if (b.left_fill.size() != L || b.right_fill.size() != R) {
            throw std::invalid_argument("boundary fill lengths must match the rule radii");
        }
        const std::uint64_t left_code = word_to_index(b.left_fill, p);
        const std::uint64_t right_code = word_to_index(b.right_fill, p);
        const std::uint64_t left_space = checked_pow(p, L);
        const std::uint64_t right_space = checked_pow(p, R);
        for (std::uint64_t s = 0; s < right_space; ++s) initial.insert(left_code * right_space + s);
        for (std::uint64_t s = 0; s < left_space; ++s) terminal.insert(s * right_space + right_code);
    } else if (b.kind == Boundary::Kind::reflective) {
        if (L != R) {
            throw std::invalid_argument("reflective boundary sets require a symmetric rule (L == R)");
        }
        const std::uint64_t side = checked_pow(p, L);
        for (std::uint64_t u = 0; u < side; ++u) {
            Word w = index_to_word(u, L, p);
            std::uint64_t rev = word_to_index(reversed(w), p);
            initial.insert(rev * side + u);
            terminal.insert(u * side + rev);
        }
    } else {
        throw std::invalid_argument("boundary sets are defined for fixed and reflective boundaries");
    }
    initial.finalize();
    terminal.finalize();
    return {std::move(initial), std::move(terminal)};
}

namespace detail {

struct WindowTreeRun {
    std::vector<SearchNode> nodes;
    std::int64_t failing = -1;  // first failing node in BFS order, -1 if none
    TreeStats stats;
};

// Breadth-first subset construction over tuple codes. `step(code, d)` yields
// the child tuple and the output state consuming one more cell; children are
// pushed in output order 0..p-1, so the first failing node is shortest and
// deterministic. A node equal to a previously expanded set is not expanded.
template <class Stepper, class FailingPred>
WindowTreeRun run_window_tree(std::uint32_t p, std::uint64_t universe, TupleSet root,
                              Stepper&& step, FailingPred&& failing) {
    WindowTreeRun run;
    run.nodes.push_back(SearchNode{std::move(root), -1, 0, 0});
    run.stats.nodes_created = 1;
    run.stats.tuples = run.nodes[0].set.size();

    NodeDedup dedup;
    std::deque<std::size_t> queue;
    queue.push_back(0);
    while (!queue.empty()) {
        const std::size_t idx = queue.front();
        queue.pop_front();
        if (run.nodes[idx].depth >= 1 && failing(run.nodes[idx].set)) {
            run.failing = static_cast<std::int64_t>(idx);
            return run;
        }
        if (!dedup.insert_if_new(run.nodes, idx)) continue;
        ++run.stats.nodes_expanded;

        std::vector<TupleSet> children;
        children.reserve(p);
        for (std::uint32_t b = 0; b < p; ++b) children.emplace_back(universe);
        run.nodes[idx].set.for_each([&](std::uint64_t code) {
            for (std::uint32_t d = 0; d < p; ++d) {
                auto [child, out] = step(code, d);
                children[out].insert(child);
            }
        });
        const std::uint32_t depth = run.nodes[idx].depth + 1;
        for (std::uint32_t b = 0; b < p; ++b) {
            children[b].finalize();
            run.stats.tuples += children[b].size();
            ++run.stats.nodes_created;
            run.nodes.push_back(SearchNode{std::move(children[b]),
                                           static_cast<std::int64_t>(idx), b, depth});
            queue.push_back(run.nodes.size() - 1);
        }
    }
    return run;
}

// Lexicographically least image word of length n not reached by any
// configuration, or nullopt when the bounded map is onto at this length.
// Used for the short lengths where the root and terminal tuples overlap.
inline std::optional<Word> first_unreached_image(const Rule& r, const Boundary& b,
                                                 std::uint32_t n) {
    const std::uint64_t total = checked_pow(r.alphabet, n);
    std::vector<bool> reached(total, false);
    for (std::uint64_t c = 0; c < total; ++c) {
        Word config = index_to_word(c, n, r.alphabet);
        reached[word_to_index(apply_global(r, config, b), r.alphabet)] = true;
    }
    for (std::uint64_t i = 0; i < total; ++i) {
        if (!reached[i]) return index_to_word(i, n, r.alphabet);
    }
    return std::nullopt;
}

// Surjectivity of a one-window rule is a permutation check on the table.
inline Verdict decide_width_one(const Rule& r, Property property, Boundary boundary) {
    std::vector<bool> seen(r.alphabet, false);
    for (Digit d : r.table) seen[d] = true;
    Verdict v{property, std::move(boundary), true, {}, {}, {}};
    for (std::uint32_t d = 0; d < r.alphabet; ++d) {
        if (!seen[d]) {
            v.holds = false;
            v.witness = GardenOfEdenWitness{Word{static_cast<Digit>(d)}};
            break;
        }
    }
    return v;
}

} // namespace detail

// Path labels from the root to a failing node: a successor word with no
// (boundary-consistent) preimage. Pass the terminal set for the bounded
// variants; without one the node itself must be empty.
inline Word extract_garden_of_eden(const std::vector<SearchNode>& nodes, std::size_t index,
                                   const TupleSet* terminal = nullptr) {
    const bool failing = terminal ? !nodes[index].set.intersects(*terminal)
                                  : nodes[index].set.empty();
    if (!failing || nodes[index].depth == 0) {
        throw std::logic_error("extract_garden_of_eden called on a non-terminal node");
    }
    Word w;
    for (std::uint32_t label : node_path_labels(nodes, index)) {
        w.push_back(static_cast<Digit>(label));
    }
    return w;
}

// Decides surjectivity of the unbounded global map via the simplified
// breadth-first tree over (m-1)-wide tuples.
inline Verdict decide_surjective_global(const Rule& r) {
    const std::uint32_t p = r.alphabet, m = r.window_size();
    if (m == 1) return detail::decide_width_one(r, Property::surjective, Boundary::unbounded());

    const std::uint64_t universe = checked_pow(p, m - 1);
    const std::uint64_t tail_mod = checked_pow(p, m - 2);
    TupleSet root(universe);
    for (std::uint64_t t = 0; t < universe; ++t) root.insert(t);
    root.finalize();

    auto run = detail::run_window_tree(
        p, universe, std::move(root),
        [&](std::uint64_t code, std::uint32_t d) {
            return std::pair<std::uint64_t, std::uint32_t>{(code % tail_mod) * p + d,
                                                           r.table[code * p + d]};
        },
        [](const TupleSet& s) { return s.empty(); });

    Verdict v{Property::surjective, Boundary::unbounded(), run.failing < 0, {}, run.stats, {}};
    if (!v.holds) {
        v.witness = GardenOfEdenWitness{
            extract_garden_of_eden(run.nodes, static_cast<std::size_t>(run.failing))};
    }
    return v;
}

namespace detail {

// Shared bounded decision: Algorithm 1 with the root restricted to the
// initial set and a node failing when it has no terminal member. Lengths
// n < m-1, where the two fill regions overlap inside one tuple, are decided
// by exhaustive enumeration first (in increasing n, so witnesses stay
// shortest-first).
inline Verdict decide_surjective_bounded_tree(const Rule& tree_rule, const Rule& semantic_rule,
                                              const Boundary& boundary, std::uint32_t small_n_lo) {
    const std::uint32_t p = tree_rule.alphabet, m = tree_rule.window_size();
    Verdict v{Property::surjective, boundary, true, {}, {}, {}};

    for (std::uint32_t n = small_n_lo; n + 1 < m; ++n) {
        if (auto unreached = first_unreached_image(semantic_rule, boundary, n)) {
            v.holds = false;
            v.witness = GardenOfEdenWitness{std::move(*unreached)};
            v.note = "decided by exhaustive enumeration at n=" + std::to_string(n);
            return v;
        }
    }

    BoundarySets sets = build_boundary_sets(tree_rule, boundary);
    const std::uint64_t universe = checked_pow(p, m - 1);
    const std::uint64_t tail_mod = checked_pow(p, m - 2);
    auto run = detail::run_window_tree(
        p, universe, std::move(sets.initial),
        [&](std::uint64_t code, std::uint32_t d) {
            return std::pair<std::uint64_t, std::uint32_t>{(code % tail_mod) * p + d,
                                                           tree_rule.table[code * p + d]};
        },
        [&](const TupleSet& s) { return !s.intersects(sets.terminal); });

    v.stats = run.stats;
    if (run.failing >= 0) {
        v.holds = false;
        v.witness = GardenOfEdenWitness{extract_garden_of_eden(
            run.nodes, static_cast<std::size_t>(run.failing), &sets.terminal)};
    }
    return v;
}

} // namespace detail

// Surjectivity for every configuration length n >= 1 under the fixed
// boundary with the given fills.
inline Verdict decide_surjective_fixed(const Rule& r, const Word& left_fill,
                                       const Word& right_fill) {
    Boundary b = Boundary::fixed(left_fill, right_fill);
    if (b.left_fill.size() != r.left_radius || b.right_fill.size() != r.right_radius) {
        throw std::invalid_argument("boundary fill lengths must match the rule radii");
    }
    for (Digit d : left_fill) {
        if (d >= r.alphabet) throw std::invalid_argument("fill digit out of range");
    }
    for (Digit d : right_fill) {
        if (d >= r.alphabet) throw std::invalid_argument("fill digit out of range");
    }
    if (r.window_size() == 1) return detail::decide_width_one(r, Property::surjective, b);
    return detail::decide_surjective_bounded_tree(r, r, b, 1);
}

// Surjectivity for every length where the mirror is defined (n >= max(L, R))
// under the reflective boundary. Rules with L != R are extended to a
// symmetric shape first; the extension ignores the added cells, so the
// bounded dynamics is unchanged.
inline Verdict decide_surjective_reflective(const Rule& r) {
    Boundary b = Boundary::reflective();
    if (r.window_size() == 1) return detail::decide_width_one(r, Property::surjective, b);
    const Rule ext = (r.left_radius == r.right_radius) ? r : extend_to_symmetric(r);
    return detail::decide_surjective_bounded_tree(ext, r, b, ext.left_radius);
}

} // namespace revca
