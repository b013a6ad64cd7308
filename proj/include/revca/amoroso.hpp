#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "revca/rule.hpp"
#include "revca/surjectivity.hpp"
#include "revca/tuple_set.hpp"
#include "revca/verdict.hpp"

namespace revca {

struct AmorosoOptions {
    std::uint64_t memory_budget_bytes = UINT64_MAX;
    // Step 4 via repeated full re-scans instead of the reverse-dependency
    // worklist; kept to demonstrate how the naive deletion degenerates.
    bool naive_deletion = false;
    // Shuffles the deletion worklist; the fixed point must not change.
    std::optional<std::uint64_t> worklist_shuffle_seed;
};

struct TableResult {
    std::optional<Verdict> verdict;  // nullopt when the memory budget is exceeded
    std::uint64_t bytes_peak = 0;
    // Post-deletion table state (box flags and surviving sequent sets),
    // order-independent by construction.
    std::uint64_t state_digest = 0;
};

// Step 1: m-tuples grouped by image; balanced rules give p^(m-1) per class.
struct ClassPartition {
    std::vector<std::vector<std::uint64_t>> classes;
};

inline ClassPartition classify_tuples(const Rule& r) {
    ClassPartition part;
    part.classes.assign(r.alphabet, {});
    for (std::uint64_t t = 0; t < r.table.size(); ++t) {
        part.classes[r.table[t]].push_back(t);
    }
    return part;
}

namespace detail {

struct table_oom {};

// Approximate allocation cost of the hashmap-of-boxes representation, so the
// budget reproduces heap exhaustion instead of guessing at it.
class MemoryMeter {
public:
    explicit MemoryMeter(std::uint64_t budget) : budget_(budget) {}

    void charge(std::uint64_t bytes) {
        used_ += bytes;
        if (used_ > peak_) peak_ = used_;
        if (used_ > budget_) throw table_oom{};
    }

    std::uint64_t peak() const { return peak_; }

private:
    std::uint64_t budget_;
    std::uint64_t used_ = 0;
    std::uint64_t peak_ = 0;
};

struct SequentBox {
    std::uint64_t alpha = 0;              // the two m-tuples of the pair
    std::uint64_t beta = 0;
    std::vector<std::uint64_t> sequents;  // keys of right sequent boxes
    std::vector<std::uint64_t> cited_by;  // boxes listing this one as a sequent
    bool merge_mark = false;              // the pair shares its right m-1 cells
    bool crossed = false;
    std::int64_t weight = -1;
    std::uint64_t pending = 0;  // unassigned sequents during weight propagation
};

// Hash node (next pointer, cached hash, key), bucket slot, and the malloc
// chunk header every node allocation pays.
inline constexpr std::uint64_t kBoxOverheadBytes = 56;
inline constexpr std::uint64_t kVectorBlockBytes = 16;  // heap block header

} // namespace detail

// Amoroso's six-step table-based injectivity decision, kept faithful as a
// baseline: boxes for every unordered pair of same-class m-tuples, right
// sequent search, iterative deletion of dead boxes, weight assignment, and
// the final left-overlap scan. Requires a balanced rule.
inline TableResult decide_injective_table(const Rule& r, const AmorosoOptions& opts = {}) {
    const std::uint32_t p = r.alphabet;
    TableResult result;

    auto verdict = [&](bool holds, std::string note) {
        return Verdict{Property::injective, Boundary::unbounded(), holds, {}, {},
                       std::move(note)};
    };

    if (!is_balanced(r)) {
        result.verdict = verdict(false, "unbalanced rule: not surjective, hence not injective");
        return result;
    }

    detail::MemoryMeter meter(opts.memory_budget_bytes);
    const std::uint64_t pm = r.table.size();
    const std::uint64_t half = pm / p;

    std::unordered_map<std::uint64_t, detail::SequentBox> boxes;
    std::vector<std::uint64_t> all_keys;
    auto pair_key = [pm](std::uint64_t a, std::uint64_t b) {
        return (a < b ? a : b) * pm + (a > b ? a : b);
    };

    try {
        ClassPartition part = classify_tuples(r);
        meter.charge(pm * 8);

        // Step 2: materialize the whole sequent table, one box per unordered
        // pair of same-class tuples, keyed for step 4's pair lookups.
        for (std::uint32_t cls = 0; cls < p; ++cls) {
            const auto& members = part.classes[cls];
            for (std::size_t i = 0; i < members.size(); ++i) {
                for (std::size_t j = i + 1; j < members.size(); ++j) {
                    const std::uint64_t alpha = members[i], beta = members[j];
                    const std::uint64_t key = pair_key(alpha, beta);
                    detail::SequentBox box;
                    box.alpha = alpha;
                    box.beta = beta;
                    box.merge_mark = (alpha % half) == (beta % half);
                    meter.charge(sizeof(detail::SequentBox) + detail::kBoxOverheadBytes +
                                 detail::kVectorBlockBytes + 8);
                    all_keys.push_back(key);
                    boxes.emplace(key, std::move(box));
                }
            }
        }

        // Step 3: search the right sequent sets of every box. A box that is
        // its own sequent set ends the run.
        for (std::uint64_t key : all_keys) {
            auto& box = boxes[key];
            for (std::uint32_t da = 0; da < p; ++da) {
                for (std::uint32_t db = 0; db < p; ++db) {
                    const std::uint64_t ap = (box.alpha % half) * p + da;
                    const std::uint64_t bp = (box.beta % half) * p + db;
                    if (ap == bp || r.table[ap] != r.table[bp]) continue;
                    const std::uint64_t skey = pair_key(ap, bp);
                    if (skey == key) {
                        result.verdict = verdict(false, "a box is its own sequent set (step 3)");
                        result.bytes_peak = meter.peak();
                        return result;
                    }
                    if (std::find(box.sequents.begin(), box.sequents.end(), skey) ==
                        box.sequents.end()) {
                        box.sequents.push_back(skey);
                        meter.charge(8);
                    }
                }
            }
            meter.charge(detail::kVectorBlockBytes);
        }

        // Reverse index for the deletion worklist.
        for (std::uint64_t key : all_keys) {
            for (std::uint64_t skey : boxes[key].sequents) {
                boxes[skey].cited_by.push_back(key);
                meter.charge(8);
            }
        }
        meter.charge(all_keys.size() * detail::kVectorBlockBytes);
    } catch (const detail::table_oom&) {
        result.bytes_peak = meter.peak();
        return result;
    }
    result.bytes_peak = meter.peak();

    // Step 4: a crossed-out box cannot serve as a sequent set; delete to a
    // fixed point.
    std::vector<std::uint64_t> worklist;
    for (std::uint64_t key : all_keys) {
        auto& box = boxes[key];
        if (!box.merge_mark && box.sequents.empty()) {
            box.crossed = true;
            worklist.push_back(key);
        }
    }
    if (opts.worklist_shuffle_seed) {
        std::mt19937_64 rng(*opts.worklist_shuffle_seed);
        for (std::size_t i = worklist.size(); i > 1; --i) {
            std::swap(worklist[i - 1], worklist[rng() % i]);
        }
    }

    if (opts.naive_deletion) {
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::uint64_t key : all_keys) {
                auto& box = boxes[key];
                if (box.crossed) continue;
                std::erase_if(box.sequents,
                              [&](std::uint64_t s) { return boxes[s].crossed; });
                if (!box.merge_mark && box.sequents.empty()) {
                    box.crossed = true;
                    changed = true;
                }
            }
        }
    } else {
        while (!worklist.empty()) {
            const std::uint64_t key = worklist.back();
            worklist.pop_back();
            for (std::uint64_t citer : boxes[key].cited_by) {
                auto& cite_box = boxes[citer];
                if (cite_box.crossed) continue;
                std::erase(cite_box.sequents, key);
                if (!cite_box.merge_mark && cite_box.sequents.empty()) {
                    cite_box.crossed = true;
                    worklist.push_back(citer);
                }
            }
        }
    }

    {
        std::uint64_t h = 0xcbf29ce484222325ull;
        auto mix = [&h](std::uint64_t v) {
            h ^= v;
            h *= 0x100000001b3ull;
        };
        for (std::uint64_t key : all_keys) {
            const auto& box = boxes[key];
            mix(key);
            mix(box.crossed ? 1 : 0);
            mix(box.merge_mark ? 3 : 2);
            std::vector<std::uint64_t> seq = box.sequents;
            std::sort(seq.begin(), seq.end());
            for (std::uint64_t s : seq) mix(s);
        }
        result.state_digest = h;
    }

    // Step 5: weight 0 for a bare merge mark, 1 + max over sequent weights
    // otherwise; boxes left unassigned sit on an unbounded extension cycle.
    std::vector<std::uint64_t> ready;
    for (std::uint64_t key : all_keys) {
        auto& box = boxes[key];
        if (box.crossed) continue;
        box.pending = box.sequents.size();
        if (box.pending == 0) {
            box.weight = 0;
            ready.push_back(key);
        }
    }
    std::unordered_map<std::uint64_t, std::int64_t> max_seen;
    while (!ready.empty()) {
        const std::uint64_t key = ready.back();
        ready.pop_back();
        const std::int64_t w = boxes[key].weight;
        for (std::uint64_t citer : boxes[key].cited_by) {
            auto& cite_box = boxes[citer];
            if (cite_box.crossed) continue;
            auto& cm = max_seen[citer];
            if (w > cm) cm = w;
            if (--cite_box.pending == 0) {
                cite_box.weight = 1 + cm;
                ready.push_back(citer);
            }
        }
    }
    for (std::uint64_t key : all_keys) {
        const auto& box = boxes[key];
        if (!box.crossed && box.weight < 0) {
            result.verdict = verdict(false, "unassigned boxes after weighting (step 5)");
            return result;
        }
    }

    // Step 6: a surviving pair sharing its left m-1 cells is replaceable.
    for (std::uint64_t key : all_keys) {
        const auto& box = boxes[key];
        if (box.crossed) continue;
        const std::uint64_t alpha = key / pm, beta = key % pm;
        if (alpha / p == beta / p) {
            result.verdict = verdict(false, "surviving pair shares its left cells (step 6)");
            return result;
        }
    }
    result.verdict = verdict(true, "all six steps passed");
    return result;
}

// Amoroso's original surjectivity tree over full m-wide window tuples, before
// the (m-1)-tuple simplification. Same verdict contract as the simplified
// tree; kept for equivalence tests and node-count comparisons.
inline Verdict decide_surjective_unsimplified(const Rule& r) {
    const std::uint32_t p = r.alphabet, m = r.window_size();
    const std::uint64_t universe = checked_pow(p, m);
    const std::uint64_t tail_mod = universe / p;

    TupleSet root(universe);
    for (std::uint64_t t = 0; t < universe; ++t) root.insert(t);
    root.finalize();

    auto run = detail::run_window_tree(
        p, universe, std::move(root),
        [&](std::uint64_t code, std::uint32_t d) {
            const std::uint64_t child = (code % tail_mod) * p + d;
            return std::pair<std::uint64_t, std::uint32_t>{child, r.table[child]};
        },
        [](const TupleSet& s) { return s.empty(); });

    Verdict v{Property::surjective, Boundary::unbounded(), run.failing < 0, {}, run.stats, {}};
    if (!v.holds) {
        v.witness = GardenOfEdenWitness{
            extract_garden_of_eden(run.nodes, static_cast<std::size_t>(run.failing))};
    }
    return v;
}

} // namespace revca
