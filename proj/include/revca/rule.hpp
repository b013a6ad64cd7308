#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "revca/detail/bignat.hpp"

namespace revca {

using Digit = std::uint8_t;
using Word = std::vector<Digit>;

// Largest rule table this library will materialize (p^m entries).
inline constexpr std::uint64_t kMaxTableSize = std::uint64_t{1} << 26;

inline std::uint64_t checked_pow(std::uint64_t base, std::uint32_t exp,
                                 std::uint64_t limit = UINT64_MAX) {
    std::uint64_t r = 1;
    for (std::uint32_t i = 0; i < exp; ++i) {
        if (base != 0 && r > limit / base) throw std::overflow_error("power exceeds limit");
        r *= base;
    }
    return r;
}

namespace detail {

inline constexpr std::string_view kDigitChars = "0123456789abcdefghijklmnopqrstuvwxyz";

inline char digit_to_char(Digit d) {
    if (d >= kDigitChars.size()) throw std::invalid_argument("digit too large for text form");
    return kDigitChars[d];
}

inline Digit char_to_digit(char c, std::uint32_t p) {
    std::size_t v;
    if (c >= '0' && c <= '9') v = static_cast<std::size_t>(c - '0');
    else if (c >= 'a' && c <= 'z') v = static_cast<std::size_t>(c - 'a') + 10;
    else throw std::invalid_argument(std::string("invalid digit character '") + c + "'");
    if (v >= p) throw std::invalid_argument(std::string("digit '") + c + "' out of range for alphabet");
    return static_cast<Digit>(v);
}

} // namespace detail

inline std::string word_to_string(std::span<const Digit> w) {
    std::string s;
    s.reserve(w.size());
    for (Digit d : w) s.push_back(detail::digit_to_char(d));
    return s;
}

inline Word word_from_string(std::string_view s, std::uint32_t p) {
    Word w;
    w.reserve(s.size());
    for (char c : s) w.push_back(detail::char_to_digit(c, p));
    return w;
}

// Big-endian tuple encoding: leftmost cell is the most significant digit.
inline std::uint64_t word_to_index(std::span<const Digit> w, std::uint32_t p) {
    std::uint64_t idx = 0;
    for (Digit d : w) idx = idx * p + d;
    return idx;
}

inline Word index_to_word(std::uint64_t idx, std::uint32_t width, std::uint32_t p) {
    Word w(width, 0);
    for (std::uint32_t i = width; i-- > 0;) {
        w[i] = static_cast<Digit>(idx % p);
        idx /= p;
    }
    return w;
}

inline Word reversed(Word w) {
    std::reverse(w.begin(), w.end());
    return w;
}

inline Word rotated_left(const Word& w, std::size_t k) {
    if (w.empty()) return w;
    k %= w.size();
    Word out(w.begin() + static_cast<std::ptrdiff_t>(k), w.end());
    out.insert(out.end(), w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k));
    return out;
}

// One-dimensional CA local rule f : S^m -> S with S = {0..p-1} and
// neighborhood shape L+1+R (m = L+1+R). table[t] is the output for the
// neighborhood whose big-endian base-p encoding is t.
struct Rule {
    std::uint32_t alphabet = 2;      // p
    std::uint32_t left_radius = 0;   // L
    std::uint32_t right_radius = 0;  // R
    std::vector<Digit> table;

    std::uint32_t window_size() const { return left_radius + 1 + right_radius; }

    Digit operator()(std::uint64_t neighborhood) const { return table[neighborhood]; }

    friend bool operator==(const Rule&, const Rule&) = default;
};

inline Rule make_rule(std::uint32_t p, std::uint32_t left, std::uint32_t right,
                      std::vector<Digit> table) {
    if (p < 2 || p > 256) throw std::invalid_argument("alphabet size must be in [2, 256]");
    std::uint32_t m = left + 1 + right;
    std::uint64_t size = checked_pow(p, m, kMaxTableSize);
    if (table.size() != size) throw std::invalid_argument("rule table length must be p^m");
    for (Digit d : table) {
        if (d >= p) throw std::invalid_argument("rule table entry out of range");
    }
    return Rule{p, left, right, std::move(table)};
}

// Printed table string, most significant neighborhood first (index p^m-1
// down to 0), as rule tables are conventionally written.
inline std::string table_string(const Rule& r) {
    std::string s;
    s.reserve(r.table.size());
    for (std::size_t i = r.table.size(); i-- > 0;) s.push_back(detail::digit_to_char(r.table[i]));
    return s;
}

inline std::string wolfram_number(const Rule& r) {
    detail::Bignat x;
    for (std::size_t i = r.table.size(); i-- > 0;) x.mul_add_small(r.alphabet, r.table[i]);
    return x.to_decimal();
}

namespace detail {

inline std::uint32_t parse_uint_field(std::string_view token, std::string_view key) {
    if (token.size() < key.size() || token.substr(0, key.size()) != key) {
        throw std::invalid_argument("expected '" + std::string(key) + "<int>' in rule spec");
    }
    std::string_view num = token.substr(key.size());
    std::uint32_t value = 0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), value);
    if (ec != std::errc{} || ptr != num.data() + num.size()) {
        throw std::invalid_argument("invalid integer in rule spec field '" + std::string(key) + "'");
    }
    return value;
}

inline std::vector<Digit> table_from_wolfram(std::string_view decimal, std::uint32_t p,
                                             std::uint64_t size) {
    Bignat x = Bignat::from_decimal(decimal);
    std::vector<Digit> table(size, 0);
    for (std::uint64_t t = 0; t < size; ++t) {
        table[t] = static_cast<Digit>(x.divmod_small(p));
    }
    if (!x.is_zero()) throw std::invalid_argument("wolfram number too large for p^m table");
    return table;
}

} // namespace detail

// Grammar: p=<int>;L=<int>;R=<int>;rule=<digits|#<decimal>>
// <digits> is the printed table, most significant neighborhood first.
inline Rule parse_rule(std::string_view spec) {
    std::vector<std::string_view> tokens;
    std::size_t start = 0;
    while (true) {
        std::size_t semi = spec.find(';', start);
        if (semi == std::string_view::npos) {
            tokens.push_back(spec.substr(start));
            break;
        }
        tokens.push_back(spec.substr(start, semi - start));
        start = semi + 1;
    }
    if (tokens.size() != 4) {
        throw std::invalid_argument("rule spec must be p=<int>;L=<int>;R=<int>;rule=<table>");
    }
    std::uint32_t p = detail::parse_uint_field(tokens[0], "p=");
    std::uint32_t left = detail::parse_uint_field(tokens[1], "L=");
    std::uint32_t right = detail::parse_uint_field(tokens[2], "R=");
    if (p < 2 || p > 256) throw std::invalid_argument("alphabet size must be in [2, 256]");

    std::string_view body = tokens[3];
    if (body.size() < 5 || body.substr(0, 5) != "rule=") {
        throw std::invalid_argument("expected 'rule=' field in rule spec");
    }
    body.remove_prefix(5);
    std::uint64_t size = checked_pow(p, left + 1 + right, kMaxTableSize);

    std::vector<Digit> table;
    if (!body.empty() && body[0] == '#') {
        table = detail::table_from_wolfram(body.substr(1), p, size);
    } else {
        if (body.size() != size) throw std::invalid_argument("rule table length must be p^m");
        table.resize(size);
        for (std::uint64_t i = 0; i < size; ++i) {
            table[size - 1 - i] = detail::char_to_digit(body[i], p);
        }
    }
    return make_rule(p, left, right, std::move(table));
}

// Canonical textual form; parse_rule(print_rule(r)) == r.
inline std::string print_rule(const Rule& r) {
    std::string out = "p=" + std::to_string(r.alphabet) + ";L=" + std::to_string(r.left_radius) +
                      ";R=" + std::to_string(r.right_radius) + ";rule=";
    if (r.alphabet <= 36) {
        out += table_string(r);
    } else {
        out += "#" + wolfram_number(r);
    }
    return out;
}

inline std::uint64_t neighborhood_index(const Rule& r, std::span<const Digit> window) {
    if (window.size() != r.window_size()) throw std::invalid_argument("window length must be m");
    return word_to_index(window, r.alphabet);
}

inline Digit evaluate_local(const Rule& r, std::span<const Digit> window) {
    for (Digit d : window) {
        if (d >= r.alphabet) throw std::invalid_argument("window digit out of range");
    }
    return r.table[neighborhood_index(r, window)];
}

// Every output state occurs exactly p^(m-1) times. Necessary for
// surjectivity (and hence injectivity) of the global map.
inline bool is_balanced(const Rule& r) {
    std::vector<std::uint64_t> counts(r.alphabet, 0);
    for (Digit d : r.table) ++counts[d];
    std::uint64_t expected = r.table.size() / r.alphabet;
    return std::all_of(counts.begin(), counts.end(),
                       [&](std::uint64_t c) { return c == expected; });
}

namespace detail {

// Append an ignored rightmost argument: new_table[i*p + d] = table[i].
// On the printed string this duplicates every digit p times in place.
inline std::vector<Digit> duplicate_entries(const std::vector<Digit>& table, std::uint32_t p) {
    std::vector<Digit> out;
    out.reserve(table.size() * p);
    for (Digit e : table) {
        for (std::uint32_t d = 0; d < p; ++d) out.push_back(e);
    }
    return out;
}

// Prepend an ignored leftmost argument: new_table[d*p^m + i] = table[i].
// On the printed string this duplicates the whole table p times.
inline std::vector<Digit> duplicate_whole(const std::vector<Digit>& table, std::uint32_t p) {
    std::vector<Digit> out;
    out.reserve(table.size() * p);
    for (std::uint32_t d = 0; d < p; ++d) out.insert(out.end(), table.begin(), table.end());
    return out;
}

} // namespace detail

// Extends the rule to a symmetric shape L' = R' = max(L, R) by adding
// arguments the new rule ignores. For every extended window the output
// equals the original rule applied to the embedded original window.
inline Rule extend_to_symmetric(const Rule& r) {
    Rule out = r;
    while (out.left_radius > out.right_radius) {
        if (out.table.size() > kMaxTableSize / out.alphabet) {
            throw std::overflow_error("extended rule table would exceed the size cap");
        }
        out.table = detail::duplicate_entries(out.table, out.alphabet);
        ++out.right_radius;
    }
    while (out.right_radius > out.left_radius) {
        if (out.table.size() > kMaxTableSize / out.alphabet) {
            throw std::overflow_error("extended rule table would exceed the size cap");
        }
        out.table = detail::duplicate_whole(out.table, out.alphabet);
        ++out.left_radius;
    }
    return out;
}

// Left-right mirror image: f'(a_1..a_m) = f(a_m..a_1) with swapped radii.
inline Rule mirrored(const Rule& r) {
    std::uint32_t m = r.window_size();
    std::vector<Digit> table(r.table.size());
    for (std::uint64_t t = 0; t < r.table.size(); ++t) {
        Word w = index_to_word(t, m, r.alphabet);
        std::reverse(w.begin(), w.end());
        table[word_to_index(w, r.alphabet)] = r.table[t];
    }
    return Rule{r.alphabet, r.right_radius, r.left_radius, std::move(table)};
}

struct Boundary {
    enum class Kind { unbounded, fixed, periodic, reflective };

    Kind kind = Kind::unbounded;
    Word left_fill;   // fixed only, length L
    Word right_fill;  // fixed only, length R

    static Boundary unbounded() { return {Kind::unbounded, {}, {}}; }
    static Boundary periodic() { return {Kind::periodic, {}, {}}; }
    static Boundary reflective() { return {Kind::reflective, {}, {}}; }
    static Boundary fixed(Word left, Word right) {
        return {Kind::fixed, std::move(left), std::move(right)};
    }
    static Boundary null_for(const Rule& r) {
        return fixed(Word(r.left_radius, 0), Word(r.right_radius, 0));
    }

    bool is_null() const {
        auto zero = [](const Word& w) {
            return std::all_of(w.begin(), w.end(), [](Digit d) { return d == 0; });
        };
        return kind == Kind::fixed && zero(left_fill) && zero(right_fill);
    }

    friend bool operator==(const Boundary&, const Boundary&) = default;
};

inline std::string boundary_to_string(const Boundary& b) {
    switch (b.kind) {
        case Boundary::Kind::unbounded: return "global";
        case Boundary::Kind::periodic: return "periodic";
        case Boundary::Kind::reflective: return "reflective";
        case Boundary::Kind::fixed:
            if (b.is_null()) return "null";
            return "fixed:" + word_to_string(b.left_fill) + ":" + word_to_string(b.right_fill);
    }
    return "?";
}

// Boundary grammar: global | null | fixed:<leftfill>:<rightfill> | periodic | reflective
inline Boundary parse_boundary(std::string_view s, const Rule& r) {
    if (s == "global") return Boundary::unbounded();
    if (s == "null") return Boundary::null_for(r);
    if (s == "periodic") return Boundary::periodic();
    if (s == "reflective") return Boundary::reflective();
    if (s.substr(0, 6) == "fixed:") {
        std::string_view rest = s.substr(6);
        std::size_t colon = rest.find(':');
        if (colon == std::string_view::npos) {
            throw std::invalid_argument("fixed boundary needs fixed:<leftfill>:<rightfill>");
        }
        Word left = word_from_string(rest.substr(0, colon), r.alphabet);
        Word right = word_from_string(rest.substr(colon + 1), r.alphabet);
        if (left.size() != r.left_radius || right.size() != r.right_radius) {
            throw std::invalid_argument("fixed boundary fill lengths must match the rule radii");
        }
        return Boundary::fixed(std::move(left), std::move(right));
    }
    throw std::invalid_argument("unknown boundary '" + std::string(s) + "'");
}

// One synchronous step of the bounded global map. The configuration is
// extended by L cells on the left and R on the right according to the
// boundary, then every window is mapped through the local rule.
inline Word apply_global(const Rule& r, const Word& config, const Boundary& boundary) {
    const std::size_t n = config.size();
    const std::uint32_t L = r.left_radius, R = r.right_radius, m = r.window_size();
    if (boundary.kind == Boundary::Kind::unbounded) {
        throw std::invalid_argument("apply_global requires a bounded boundary");
    }
    if (n == 0) throw std::invalid_argument("configuration must have at least one cell");
    for (Digit d : config) {
        if (d >= r.alphabet) throw std::invalid_argument("configuration digit out of range");
    }

    Word ext;
    ext.reserve(n + L + R);
    switch (boundary.kind) {
        case Boundary::Kind::fixed:
            if (boundary.left_fill.size() != L || boundary.right_fill.size() != R) {
                throw std::invalid_argument("boundary fill lengths must match the rule radii");
            }
            ext.insert(ext.end(), boundary.left_fill.begin(), boundary.left_fill.end());
            ext.insert(ext.end(), config.begin(), config.end());
            ext.insert(ext.end(), boundary.right_fill.begin(), boundary.right_fill.end());
            break;
        case Boundary::Kind::periodic:
            for (std::uint32_t i = 0; i < L; ++i) ext.push_back(config[(n - (L - i) % n) % n]);
            ext.insert(ext.end(), config.begin(), config.end());
            for (std::uint32_t i = 0; i < R; ++i) ext.push_back(config[i % n]);
            break;
        case Boundary::Kind::reflective: {
            // The cell d steps outside the boundary mirrors the cell d steps
            // inside. Undefined when the mirror window is longer than the
            // configuration.
            if (n < L || n < R) {
                throw std::invalid_argument("reflective boundary undefined for n < max(L, R)");
            }
            for (std::uint32_t i = 0; i < L; ++i) ext.push_back(config[L - 1 - i]);
            ext.insert(ext.end(), config.begin(), config.end());
            for (std::uint32_t i = 0; i < R; ++i) ext.push_back(config[n - 1 - i]);
            break;
        }
        case Boundary::Kind::unbounded: break;
    }

    const std::uint64_t window_mod = checked_pow(r.alphabet, m - 1);
    Word out(n, 0);
    std::uint64_t idx = 0;
    for (std::uint32_t j = 0; j < m; ++j) idx = idx * r.alphabet + ext[j];
    out[0] = r.table[idx];
    for (std::size_t i = 1; i < n; ++i) {
        idx = (idx % window_mod) * r.alphabet + ext[i + m - 1];
        out[i] = r.table[idx];
    }
    return out;
}

// Image of a local configuration under sliding windows (no boundary).
// The result has |w| - m + 1 cells; w must span at least one window.
inline Word local_image(const Rule& r, const Word& w) {
    const std::uint32_t m = r.window_size();
    if (w.size() < m) throw std::invalid_argument("local configuration shorter than one window");
    const std::uint64_t window_mod = checked_pow(r.alphabet, m - 1);
    Word out(w.size() - m + 1, 0);
    std::uint64_t idx = 0;
    for (std::uint32_t j = 0; j < m; ++j) idx = idx * r.alphabet + w[j];
    out[0] = r.table[idx];
    for (std::size_t i = 1; i + m - 1 < w.size(); ++i) {
        idx = (idx % window_mod) * r.alphabet + w[i + m - 1];
        out[i] = r.table[idx];
    }
    return out;
}

} // namespace revca
