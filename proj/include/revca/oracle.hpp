#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "revca/rule.hpp"
#include "revca/verdict.hpp"

namespace revca {

struct budget_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Enumeration guard: p^n configurations at most.
inline constexpr std::uint64_t kOracleEnumerationBudget = std::uint64_t{1} << 24;

namespace detail {

inline std::uint64_t guarded_space(std::uint32_t p, std::uint32_t n) {
    std::uint64_t total;
    try {
        total = checked_pow(p, n, kOracleEnumerationBudget);
    } catch (const std::overflow_error&) {
        throw budget_error("oracle enumeration budget exceeded (p^n > 2^24)");
    }
    return total;
}

inline bool bounded_map_defined(const Rule& r, const Boundary& b, std::uint32_t n) {
    if (b.kind == Boundary::Kind::reflective) {
        return n >= r.left_radius && n >= r.right_radius;
    }
    return true;
}

} // namespace detail

struct SurjectivityCheck {
    bool holds = false;
    std::optional<Word> unreached;  // lexicographically least unreached image
};

struct InjectivityCheck {
    bool holds = false;
    std::optional<std::pair<Word, Word>> collision;  // first colliding pair, lex order
};

// Marks the image of every configuration of length n; surjective iff the
// image set is complete.
inline SurjectivityCheck oracle_surjective_bounded(const Rule& r, const Boundary& b,
                                                   std::uint32_t n) {
    if (b.kind == Boundary::Kind::unbounded) {
        throw std::invalid_argument("bounded oracle requires a bounded boundary");
    }
    if (n == 0) throw std::invalid_argument("configuration length must be positive");
    const std::uint64_t total = detail::guarded_space(r.alphabet, n);
    std::vector<bool> reached(total, false);
    for (std::uint64_t c = 0; c < total; ++c) {
        Word config = index_to_word(c, n, r.alphabet);
        reached[word_to_index(apply_global(r, config, b), r.alphabet)] = true;
    }
    for (std::uint64_t i = 0; i < total; ++i) {
        if (!reached[i]) return {false, index_to_word(i, n, r.alphabet)};
    }
    return {true, std::nullopt};
}

// True iff no two distinct configurations of length n share an image.
inline InjectivityCheck oracle_injective_bounded(const Rule& r, const Boundary& b,
                                                 std::uint32_t n) {
    if (b.kind == Boundary::Kind::unbounded) {
        throw std::invalid_argument("bounded oracle requires a bounded boundary");
    }
    if (n == 0) throw std::invalid_argument("configuration length must be positive");
    const std::uint64_t total = detail::guarded_space(r.alphabet, n);
    std::vector<std::int64_t> first_preimage(total, -1);
    for (std::uint64_t c = 0; c < total; ++c) {
        Word config = index_to_word(c, n, r.alphabet);
        std::uint64_t image = word_to_index(apply_global(r, config, b), r.alphabet);
        if (first_preimage[image] >= 0) {
            return {false,
                    std::make_pair(index_to_word(static_cast<std::uint64_t>(first_preimage[image]),
                                                 n, r.alphabet),
                                   std::move(config))};
        }
        first_preimage[image] = static_cast<std::int64_t>(c);
    }
    return {true, std::nullopt};
}

// One-sided check of global surjectivity: every word of length <= k must be
// the image of some window word of length |w| + m - 1. Dynamic programming
// over the overlapping-window suffixes; can refute but not certify.
inline SurjectivityCheck oracle_globally_surjective_up_to(const Rule& r, std::uint32_t k) {
    const std::uint32_t p = r.alphabet, m = r.window_size();
    if (m == 1) {
        std::vector<bool> out(p, false);
        for (Digit d : r.table) out[d] = true;
        for (std::uint32_t d = 0; d < p; ++d) {
            if (!out[d]) return {false, Word{static_cast<Digit>(d)}};
        }
        return {true, std::nullopt};
    }
    const std::uint64_t suffix_space = checked_pow(p, m - 1);
    const std::uint64_t tail_mod = checked_pow(p, m - 2);
    const std::size_t blocks = static_cast<std::size_t>((suffix_space + 63) / 64);

    for (std::uint32_t len = 1; len <= k; ++len) {
        const std::uint64_t words = detail::guarded_space(p, len);
        for (std::uint64_t widx = 0; widx < words; ++widx) {
            Word w = index_to_word(widx, len, p);
            std::vector<std::uint64_t> cur(blocks, ~std::uint64_t{0});
            if (suffix_space % 64) cur.back() = (std::uint64_t{1} << (suffix_space % 64)) - 1;
            bool alive = true;
            for (Digit b : w) {
                std::vector<std::uint64_t> next(blocks, 0);
                alive = false;
                for (std::size_t blk = 0; blk < blocks; ++blk) {
                    std::uint64_t bits = cur[blk];
                    while (bits) {
                        std::uint64_t code = blk * 64 +
                            static_cast<std::uint64_t>(std::countr_zero(bits));
                        bits &= bits - 1;
                        for (std::uint32_t d = 0; d < p; ++d) {
                            if (r.table[code * p + d] == b) {
                                std::uint64_t child = (code % tail_mod) * p + d;
                                next[child >> 6] |= std::uint64_t{1} << (child & 63);
                                alive = true;
                            }
                        }
                    }
                }
                cur = std::move(next);
                if (!alive) break;
            }
            if (!alive) return {false, std::move(w)};
        }
    }
    return {true, std::nullopt};
}

// Machine-checks the witness attached to a negative verdict against the
// definitions, by direct enumeration where a non-existence claim is made.
inline bool verify_witness(const Rule& r, const Verdict& verdict) {
    if (!has_witness(verdict.witness)) {
        throw std::invalid_argument("verdict carries no witness");
    }
    const std::uint32_t p = r.alphabet, m = r.window_size();

    if (const auto* goe = std::get_if<GardenOfEdenWitness>(&verdict.witness)) {
        const Word& w = goe->word;
        if (w.empty()) return false;
        for (Digit d : w) {
            if (d >= p) return false;
        }
        if (verdict.boundary.kind == Boundary::Kind::unbounded) {
            const std::uint64_t space =
                detail::guarded_space(p, static_cast<std::uint32_t>(w.size()) + m - 1);
            for (std::uint64_t u = 0; u < space; ++u) {
                Word window = index_to_word(u, static_cast<std::uint32_t>(w.size()) + m - 1, p);
                if (local_image(r, window) == w) return false;
            }
            return true;
        }
        const std::uint32_t n = static_cast<std::uint32_t>(w.size());
        if (!detail::bounded_map_defined(r, verdict.boundary, n)) return false;
        const std::uint64_t space = detail::guarded_space(p, n);
        for (std::uint64_t c = 0; c < space; ++c) {
            if (apply_global(r, index_to_word(c, n, p), verdict.boundary) == w) return false;
        }
        return true;
    }

    if (const auto* pw = std::get_if<PeriodicPairWitness>(&verdict.witness)) {
        if (pw->predecessor_a.size() != pw->predecessor_b.size()) return false;
        if (pw->predecessor_a.empty() || pw->predecessor_a == pw->predecessor_b) return false;
        auto self_overlapping = [m](const Word& t) {
            if (t.empty()) return m == 1;
            if (t.size() != 2 * static_cast<std::size_t>(m - 1)) return false;
            for (std::size_t i = 0; i + m - 1 < t.size(); ++i) {
                if (t[i] != t[i + m - 1]) return false;
            }
            return true;
        };
        if (!self_overlapping(pw->tuple_a) || !self_overlapping(pw->tuple_b)) return false;
        try {
            return apply_global(r, pw->predecessor_a, Boundary::periodic()) == pw->image &&
                   apply_global(r, pw->predecessor_b, Boundary::periodic()) == pw->image;
        } catch (const std::invalid_argument&) {
            return false;
        }
    }

    if (const auto* cw = std::get_if<CollisionWitness>(&verdict.witness)) {
        if (cw->predecessor_a.size() != cw->predecessor_b.size()) return false;
        if (cw->predecessor_a.empty() || cw->predecessor_a == cw->predecessor_b) return false;
        try {
            return apply_global(r, cw->predecessor_a, verdict.boundary) == cw->image &&
                   apply_global(r, cw->predecessor_b, verdict.boundary) == cw->image;
        } catch (const std::invalid_argument&) {
            return false;
        }
    }

    const auto& rep = std::get<ReplaceableWitness>(verdict.witness);
    const Word& a = rep.word_a;
    const Word& b = rep.word_b;
    if (a.size() != b.size() || a.size() < 2 * static_cast<std::size_t>(m) - 1) return false;
    if (a == b) return false;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        if (a[i] != b[i]) return false;
        if (a[a.size() - 1 - i] != b[b.size() - 1 - i]) return false;
    }
    try {
        return local_image(r, a) == local_image(r, b);
    } catch (const std::invalid_argument&) {
        return false;
    }
}

// Per-length ground truth over a range of configuration lengths.
struct OracleReport {
    struct Entry {
        std::uint32_t n = 0;
        bool defined = true;  // false where the boundary leaves the map undefined
        bool surjective = false;
        bool injective = false;
        std::optional<Word> unreached;
        std::optional<std::pair<Word, Word>> collision;
    };
    Boundary boundary;
    std::vector<Entry> entries;

    bool all_surjective() const {
        for (const auto& e : entries) {
            if (e.defined && !e.surjective) return false;
        }
        return true;
    }
    bool all_injective() const {
        for (const auto& e : entries) {
            if (e.defined && !e.injective) return false;
        }
        return true;
    }
};

inline OracleReport oracle_report(const Rule& r, const Boundary& b, std::uint32_t n_lo,
                                  std::uint32_t n_hi) {
    OracleReport report;
    report.boundary = b;
    for (std::uint32_t n = n_lo; n <= n_hi; ++n) {
        OracleReport::Entry e;
        e.n = n;
        if (!detail::bounded_map_defined(r, b, n)) {
            e.defined = false;
            report.entries.push_back(std::move(e));
            continue;
        }
        auto s = oracle_surjective_bounded(r, b, n);
        auto i = oracle_injective_bounded(r, b, n);
        e.surjective = s.holds;
        e.injective = i.holds;
        e.unreached = std::move(s.unreached);
        e.collision = std::move(i.collision);
        report.entries.push_back(std::move(e));
    }
    return report;
}

} // namespace revca
