#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "revca/amoroso.hpp"
#include "revca/injectivity.hpp"
#include "revca/oracle.hpp"
#include "revca/rule.hpp"
#include "revca/surjectivity.hpp"

namespace revca {

// Largest rule space an exhaustive enumeration will walk.
inline constexpr std::uint64_t kEnumerationCap = std::uint64_t{1} << 26;

// Default neighborhood split for surveys addressed by m alone.
inline std::uint32_t default_left_radius(std::uint32_t m) { return (m - 1) / 2; }

inline Rule rule_from_index(std::uint64_t index, std::uint32_t p, std::uint32_t left,
                            std::uint32_t right) {
    const std::uint64_t size = checked_pow(p, left + 1 + right, kMaxTableSize);
    std::vector<Digit> table(size);
    for (std::uint64_t t = 0; t < size; ++t) {
        table[t] = static_cast<Digit>(index % p);
        index /= p;
    }
    return Rule{p, left, right, std::move(table)};
}

namespace detail {

inline std::uint64_t balanced_rule_count(std::uint32_t p, std::uint32_t m) {
    // Multinomial (p^m)! / ((p^(m-1))!)^p as a product of binomials.
    const std::uint64_t n = checked_pow(p, m);
    const std::uint64_t k = n / p;
    std::uint64_t remaining = n;
    unsigned __int128 total = 1;
    for (std::uint32_t cls = 0; cls + 1 < p; ++cls) {
        unsigned __int128 binom = 1;
        for (std::uint64_t i = 1; i <= k; ++i) {
            binom = binom * (remaining - k + i) / i;
            if (binom > (static_cast<unsigned __int128>(1) << 80)) {
                throw budget_error("balanced rule space too large to enumerate");
            }
        }
        total *= binom;
        remaining -= k;
        if (total > (static_cast<unsigned __int128>(1) << 80)) {
            throw budget_error("balanced rule space too large to enumerate");
        }
    }
    if (total > kEnumerationCap) throw budget_error("balanced rule space exceeds enumeration cap");
    return static_cast<std::uint64_t>(total);
}

inline std::uint64_t bounded_rand(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % n;
}

} // namespace detail

// Streams rules in ascending Wolfram-number order, either the full space or
// exactly the balanced tables.
class RuleEnumerator {
public:
    static RuleEnumerator all(std::uint32_t p, std::uint32_t left, std::uint32_t right) {
        RuleEnumerator e(p, left, right, false);
        const std::uint64_t size = checked_pow(p, e.m_, kMaxTableSize);
        try {
            e.total_ = checked_pow(p, static_cast<std::uint32_t>(size), kEnumerationCap);
        } catch (const std::overflow_error&) {
            throw budget_error("rule space exceeds enumeration cap");
        }
        e.table_.assign(size, 0);
        return e;
    }

    static RuleEnumerator balanced(std::uint32_t p, std::uint32_t left, std::uint32_t right) {
        RuleEnumerator e(p, left, right, true);
        const std::uint64_t size = checked_pow(p, e.m_, kMaxTableSize);
        e.total_ = detail::balanced_rule_count(p, e.m_);
        // Printed digits (most significant first) start at the smallest
        // permutation; next_permutation walks Wolfram numbers upward.
        e.printed_.reserve(size);
        for (std::uint32_t d = 0; d < p; ++d) {
            e.printed_.insert(e.printed_.end(), size / p, static_cast<Digit>(d));
        }
        return e;
    }

    std::uint64_t total() const { return total_; }

    std::optional<Rule> next() {
        if (done_) return std::nullopt;
        Rule out;
        if (balanced_) {
            std::vector<Digit> table(printed_.size());
            for (std::size_t i = 0; i < printed_.size(); ++i) {
                table[printed_.size() - 1 - i] = printed_[i];
            }
            out = Rule{p_, left_, right_, std::move(table)};
            done_ = !std::next_permutation(printed_.begin(), printed_.end());
        } else {
            out = Rule{p_, left_, right_, table_};
            done_ = true;
            for (auto& d : table_) {
                if (++d < p_) {
                    done_ = false;
                    break;
                }
                d = 0;
            }
        }
        return out;
    }

private:
    RuleEnumerator(std::uint32_t p, std::uint32_t left, std::uint32_t right, bool balanced)
        : p_(p), left_(left), right_(right), m_(left + 1 + right), balanced_(balanced) {}

    std::uint32_t p_, left_, right_, m_;
    bool balanced_;
    bool done_ = false;
    std::uint64_t total_ = 0;
    std::vector<Digit> table_;    // full space: current table, little-endian odometer
    std::vector<Digit> printed_;  // balanced: printed digits for next_permutation
};

// Uniform over exactly-balanced tables: a seeded shuffle of the output
// multiset.
inline Rule sample_balanced_rule(std::uint32_t p, std::uint32_t left, std::uint32_t right,
                                 std::mt19937_64& rng) {
    const std::uint64_t size = checked_pow(p, left + 1 + right, kMaxTableSize);
    std::vector<Digit> table;
    table.reserve(size);
    for (std::uint32_t d = 0; d < p; ++d) {
        table.insert(table.end(), size / p, static_cast<Digit>(d));
    }
    for (std::size_t i = table.size(); i > 1; --i) {
        std::swap(table[i - 1], table[detail::bounded_rand(rng, i)]);
    }
    return Rule{p, left, right, std::move(table)};
}

// Fixed fill with 0 in the cell adjacent to each boundary, alternating
// outward (the usual "...0101 | cells | 1010..." picture).
inline Boundary alternating_fixed_boundary(std::uint32_t left_radius,
                                           std::uint32_t right_radius) {
    Word left(left_radius), right(right_radius);
    for (std::uint32_t i = 0; i < left_radius; ++i) {
        left[i] = static_cast<Digit>((left_radius - 1 - i) % 2);
    }
    for (std::uint32_t i = 0; i < right_radius; ++i) {
        right[i] = static_cast<Digit>(i % 2);
    }
    return Boundary::fixed(std::move(left), std::move(right));
}

struct SurveyParams {
    std::uint32_t m = 3;
    std::uint32_t p = 2;
    std::optional<std::uint32_t> left_radius;  // defaults to floor((m-1)/2)
    Boundary boundary = Boundary::unbounded();
    Property property = Property::surjective;
    bool balanced_only = false;
    std::uint32_t threads = 1;
    bool collect_rules = false;
};

struct SurveyRow {
    std::uint32_t m = 0;
    std::uint32_t p = 0;
    std::uint32_t left_radius = 0;
    std::uint32_t right_radius = 0;
    std::string boundary;
    std::string property;
    std::uint64_t count = 0;
    std::uint64_t total = 0;
    double seconds = 0.0;
    std::vector<std::string> rules;  // qualifying Wolfram numbers, when collected
};

namespace detail {

inline bool survey_decide(const Rule& r, Property property, const Boundary& b) {
    InjectivityOptions shortcut;
    shortcut.unbalanced_shortcut = true;  // sound for the global/periodic cases only
    if (property == Property::surjective) {
        switch (b.kind) {
            case Boundary::Kind::unbounded: return decide_surjective_global(r).holds;
            case Boundary::Kind::fixed:
                return decide_surjective_fixed(r, b.left_fill, b.right_fill).holds;
            case Boundary::Kind::periodic: return decide_surjective_periodic(r, shortcut).holds;
            case Boundary::Kind::reflective: return decide_surjective_reflective(r).holds;
        }
    } else {
        switch (b.kind) {
            case Boundary::Kind::unbounded: return decide_injective_global(r, shortcut).holds;
            case Boundary::Kind::periodic:
                return decide_injective_bounded(r, b, shortcut, false).holds;
            default: return decide_injective_bounded(r, b, {}, false).holds;
        }
    }
    return false;
}

} // namespace detail

// Applies the matching decision to every rule of the given shape and counts
// the qualifying ones. Exhaustive unless balanced_only; full-space scans may
// run chunked across threads with a deterministic merge by rule number.
inline SurveyRow survey_counts(const SurveyParams& params) {
    const std::uint32_t left = params.left_radius.value_or(default_left_radius(params.m));
    if (left >= params.m) throw std::invalid_argument("left radius must be below m");
    const std::uint32_t right = params.m - 1 - left;

    Boundary boundary = params.boundary;
    if (boundary.kind == Boundary::Kind::fixed &&
        (boundary.left_fill.size() != left || boundary.right_fill.size() != right)) {
        throw std::invalid_argument("fixed boundary fills must match the survey shape");
    }

    SurveyRow row;
    row.m = params.m;
    row.p = params.p;
    row.left_radius = left;
    row.right_radius = right;
    row.boundary = boundary_to_string(boundary);
    row.property = property_to_string(params.property);

    const auto start = std::chrono::steady_clock::now();
    if (params.balanced_only) {
        auto e = RuleEnumerator::balanced(params.p, left, right);
        row.total = e.total();
        while (auto rule = e.next()) {
            if (detail::survey_decide(*rule, params.property, boundary)) {
                ++row.count;
                if (params.collect_rules) row.rules.push_back(wolfram_number(*rule));
            }
        }
    } else {
        auto probe = RuleEnumerator::all(params.p, left, right);
        row.total = probe.total();
        const std::uint32_t workers =
            std::max<std::uint32_t>(1, std::min<std::uint32_t>(params.threads, 64));
        struct Chunk {
            std::uint64_t count = 0;
            std::vector<std::uint64_t> rules;
        };
        std::vector<Chunk> chunks(workers);
        std::vector<std::thread> pool;
        const std::uint64_t per = (row.total + workers - 1) / workers;
        for (std::uint32_t w = 0; w < workers; ++w) {
            const std::uint64_t lo = w * per;
            const std::uint64_t hi = std::min(row.total, lo + per);
            pool.emplace_back([&, w, lo, hi] {
                for (std::uint64_t i = lo; i < hi; ++i) {
                    Rule rule = rule_from_index(i, params.p, left, right);
                    if (detail::survey_decide(rule, params.property, boundary)) {
                        ++chunks[w].count;
                        if (params.collect_rules) chunks[w].rules.push_back(i);
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        for (const auto& chunk : chunks) {
            row.count += chunk.count;
            for (std::uint64_t i : chunk.rules) row.rules.push_back(std::to_string(i));
        }
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return row;
}

struct BenchRecord {
    std::uint32_t m = 0;
    std::uint32_t p = 0;
    std::uint64_t sample = 0;
    std::uint64_t seed = 0;
    std::uint64_t attempted = 0;  // rules actually visited (time budget may stop early)
    std::uint64_t table_completed = 0;
    std::uint64_t tree_completed = 0;
    std::uint64_t table_oom = 0;
    std::uint64_t tree_oom = 0;
    std::uint64_t verdict_mismatches = 0;
    double table_mean_ms = 0.0;
    double table_median_ms = 0.0;
    double tree_mean_ms = 0.0;
    double tree_median_ms = 0.0;
    double time_ratio = 0.0;  // table mean over tree mean, 0 when undefined
    double mean_tuples = 0.0;
    double mean_nodes_expanded = 0.0;
    double tuple_bound = 0.0;  // 2^(2m-1)
    bool time_budget_exhausted = false;
};

// Times both injectivity deciders on the same seeded sample of balanced
// rules, cold state per invocation, sequential to avoid contention skew.
// Ten warm-up rules are timed and discarded.
inline BenchRecord bench_compare(std::uint32_t m, std::uint32_t p, std::uint64_t sample,
                                 std::uint64_t seed, double time_budget_seconds = 0.0,
                                 std::uint64_t memory_budget_bytes = UINT64_MAX) {
    if (sample == 0) throw std::invalid_argument("sample must be positive");
    const std::uint32_t left = default_left_radius(m);
    const std::uint32_t right = m - 1 - left;

    BenchRecord rec;
    rec.m = m;
    rec.p = p;
    rec.sample = sample;
    rec.seed = seed;
    rec.tuple_bound = std::pow(2.0, 2.0 * m - 1.0);

    std::mt19937_64 rng(seed);
    AmorosoOptions table_opts;
    table_opts.memory_budget_bytes = memory_budget_bytes;
    InjectivityOptions tree_opts;
    tree_opts.memory_budget_bytes = memory_budget_bytes;

    for (int warm = 0; warm < 10; ++warm) {
        Rule rule = sample_balanced_rule(p, left, right, rng);
        (void)decide_injective_table(rule, table_opts);
        (void)detail::run_pair_tree(rule, tree_opts);
    }

    std::vector<double> table_ms, tree_ms;
    std::uint64_t tuples_sum = 0, nodes_sum = 0;
    const auto bench_start = std::chrono::steady_clock::now();
    for (std::uint64_t i = 0; i < sample; ++i) {
        if (time_budget_seconds > 0.0) {
            const double elapsed =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - bench_start)
                    .count();
            if (elapsed > time_budget_seconds) {
                rec.time_budget_exhausted = true;
                break;
            }
        }
        Rule rule = sample_balanced_rule(p, left, right, rng);
        ++rec.attempted;

        const auto t0 = std::chrono::steady_clock::now();
        TableResult table = decide_injective_table(rule, table_opts);
        const auto t1 = std::chrono::steady_clock::now();
        auto tree = detail::run_pair_tree(rule, tree_opts);
        const auto t2 = std::chrono::steady_clock::now();

        std::optional<bool> tree_verdict;
        if (tree.termination == detail::PairTreeTermination::out_of_memory) {
            ++rec.tree_oom;
        } else {
            tree_verdict = tree.termination == detail::PairTreeTermination::exhausted;
            ++rec.tree_completed;
            tree_ms.push_back(std::chrono::duration<double, std::milli>(t2 - t1).count());
            tuples_sum += tree.stats.tuples;
            nodes_sum += tree.stats.nodes_expanded;
        }
        if (!table.verdict) {
            ++rec.table_oom;
        } else {
            ++rec.table_completed;
            table_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
            if (tree_verdict && table.verdict->holds != *tree_verdict) {
                ++rec.verdict_mismatches;
            }
        }
    }

    auto summarize = [](std::vector<double>& v, double& mean, double& median) {
        if (v.empty()) return;
        double sum = 0.0;
        for (double x : v) sum += x;
        mean = sum / static_cast<double>(v.size());
        std::sort(v.begin(), v.end());
        median = v[v.size() / 2];
    };
    summarize(table_ms, rec.table_mean_ms, rec.table_median_ms);
    summarize(tree_ms, rec.tree_mean_ms, rec.tree_median_ms);
    if (!table_ms.empty() && !tree_ms.empty() && rec.tree_mean_ms > 0.0) {
        rec.time_ratio = rec.table_mean_ms / rec.tree_mean_ms;
    }
    if (rec.tree_completed > 0) {
        rec.mean_tuples = static_cast<double>(tuples_sum) / static_cast<double>(rec.tree_completed);
        rec.mean_nodes_expanded =
            static_cast<double>(nodes_sum) / static_cast<double>(rec.tree_completed);
    }
    return rec;
}

struct NodeStats {
    std::uint32_t m = 0;
    std::uint32_t p = 0;
    std::uint64_t sample = 0;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> tuples;          // per run, at termination
    std::vector<std::uint64_t> nodes_expanded;  // per run
    double mean_tuples = 0.0;
    double mean_nodes_expanded = 0.0;
    std::uint64_t max_tuples = 0;
    double bound = 0.0;  // 2^(2m-1)
};

// Tuple-count statistics of the injectivity tree over random balanced rules,
// reported against the 2^(2m-1) expectation.
inline NodeStats node_stats(std::uint32_t m, std::uint32_t p, std::uint64_t sample,
                            std::uint64_t seed) {
    if (sample == 0) throw std::invalid_argument("sample must be positive");
    const std::uint32_t left = default_left_radius(m);
    const std::uint32_t right = m - 1 - left;

    NodeStats stats;
    stats.m = m;
    stats.p = p;
    stats.sample = sample;
    stats.seed = seed;
    stats.bound = std::pow(2.0, 2.0 * m - 1.0);

    std::mt19937_64 rng(seed);
    std::uint64_t tuples_sum = 0, nodes_sum = 0;
    for (std::uint64_t i = 0; i < sample; ++i) {
        Rule rule = sample_balanced_rule(p, left, right, rng);
        auto run = detail::run_pair_tree(rule, {});
        stats.tuples.push_back(run.stats.tuples);
        stats.nodes_expanded.push_back(run.stats.nodes_expanded);
        tuples_sum += run.stats.tuples;
        nodes_sum += run.stats.nodes_expanded;
        stats.max_tuples = std::max(stats.max_tuples, run.stats.tuples);
    }
    stats.mean_tuples = static_cast<double>(tuples_sum) / static_cast<double>(sample);
    stats.mean_nodes_expanded = static_cast<double>(nodes_sum) / static_cast<double>(sample);
    return stats;
}

inline std::string survey_csv_header() { return "m,boundary,property,count,total,seconds"; }

inline std::string to_csv_line(const SurveyRow& row, bool with_timing = true) {
    char seconds[32];
    std::snprintf(seconds, sizeof(seconds), "%.3f", with_timing ? row.seconds : 0.0);
    return std::to_string(row.m) + "," + row.boundary + "," + row.property + "," +
           std::to_string(row.count) + "," + std::to_string(row.total) + "," + seconds;
}

inline nlohmann::ordered_json to_json(const SurveyRow& row, bool with_timing = true) {
    nlohmann::ordered_json j;
    j["m"] = row.m;
    j["p"] = row.p;
    j["left_radius"] = row.left_radius;
    j["right_radius"] = row.right_radius;
    j["boundary"] = row.boundary;
    j["property"] = row.property;
    j["count"] = row.count;
    j["total"] = row.total;
    j["seconds"] = with_timing ? row.seconds : 0.0;
    if (!row.rules.empty()) j["rules"] = row.rules;
    return j;
}

inline nlohmann::ordered_json to_json(const BenchRecord& rec) {
    nlohmann::ordered_json j;
    j["kind"] = "bench";
    j["m"] = rec.m;
    j["p"] = rec.p;
    j["sample"] = rec.sample;
    j["seed"] = rec.seed;
    j["attempted"] = rec.attempted;
    j["table_completed"] = rec.table_completed;
    j["tree_completed"] = rec.tree_completed;
    j["table_oom"] = rec.table_oom;
    j["tree_oom"] = rec.tree_oom;
    j["verdict_mismatches"] = rec.verdict_mismatches;
    j["table_mean_ms"] = rec.table_mean_ms;
    j["table_median_ms"] = rec.table_median_ms;
    j["tree_mean_ms"] = rec.tree_mean_ms;
    j["tree_median_ms"] = rec.tree_median_ms;
    j["time_ratio"] = rec.time_ratio;
    j["mean_tuples"] = rec.mean_tuples;
    j["mean_nodes_expanded"] = rec.mean_nodes_expanded;
    j["tuple_bound"] = rec.tuple_bound;
    j["time_budget_exhausted"] = rec.time_budget_exhausted;
    return j;
}

inline nlohmann::ordered_json to_json(const NodeStats& stats) {
    nlohmann::ordered_json j;
    j["kind"] = "node_stats";
    j["m"] = stats.m;
    j["p"] = stats.p;
    j["sample"] = stats.sample;
    j["seed"] = stats.seed;
    j["mean_tuples"] = stats.mean_tuples;
    j["mean_nodes_expanded"] = stats.mean_nodes_expanded;
    j["max_tuples"] = stats.max_tuples;
    j["bound"] = stats.bound;
    j["mean_below_bound"] = stats.mean_tuples < stats.bound;
    return j;
}

} // namespace revca
