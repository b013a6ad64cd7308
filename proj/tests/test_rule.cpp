#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "revca/rule.hpp"

using namespace revca;

namespace {

Rule eca(const std::string& table) { return parse_rule("p=2;L=1;R=1;rule=" + table); }

Rule random_rule(std::mt19937_64& rng, std::uint32_t max_p = 4, std::uint32_t max_radius = 2) {
    const std::uint32_t p = 2 + static_cast<std::uint32_t>(rng() % (max_p - 1));
    const std::uint32_t left = static_cast<std::uint32_t>(rng() % (max_radius + 1));
    const std::uint32_t right = static_cast<std::uint32_t>(rng() % (max_radius + 1));
    const std::uint64_t size = checked_pow(p, left + 1 + right);
    std::vector<Digit> table(size);
    for (auto& d : table) d = static_cast<Digit>(rng() % p);
    return make_rule(p, left, right, std::move(table));
}

Word random_word(std::mt19937_64& rng, std::size_t n, std::uint32_t p) {
    Word w(n);
    for (auto& d : w) d = static_cast<Digit>(rng() % p);
    return w;
}

} // namespace

TEST_CASE("parse_rule reads the printed table most significant first") {
    Rule r = eca("01100110");
    CHECK(r.alphabet == 2);
    CHECK(r.window_size() == 3);
    CHECK(r.table[0b111] == 0);
    CHECK(r.table[0b110] == 1);
    CHECK(r.table[0b101] == 1);
    CHECK(r.table[0b100] == 0);
    CHECK(r.table[0b011] == 0);
    CHECK(r.table[0b010] == 1);
    CHECK(r.table[0b001] == 1);
    CHECK(r.table[0b000] == 0);
    CHECK(wolfram_number(r) == "102");
    CHECK(table_string(r) == "01100110");
}

TEST_CASE("parse_rule accepts the wolfram-number form") {
    Rule zero = parse_rule("p=2;L=1;R=1;rule=#0");
    for (Digit d : zero.table) CHECK(d == 0);

    Rule r102 = parse_rule("p=2;L=1;R=1;rule=#102");
    CHECK(r102 == eca("01100110"));
}

TEST_CASE("identity rule 204 returns the middle cell everywhere") {
    Rule id = eca("11001100");
    CHECK(wolfram_number(id) == "204");
    for (std::uint64_t t = 0; t < 8; ++t) {
        CHECK(id.table[t] == ((t >> 1) & 1));
    }
}

TEST_CASE("parse_rule rejects malformed specs") {
    CHECK_THROWS_AS(parse_rule("p=2;L=1;R=1;rule=0110011x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rule("p=2;L=1;R=1;rule=01100112"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rule("p=2;L=1;R=1;rule=0110"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rule("p=2;L=1;R=1;rule=#256"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rule("p=1;L=1;R=1;rule=000"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rule("p=2;L=1;rule=01100110"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rule("q=2;L=1;R=1;rule=01100110"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rule("p=2;L=x;R=1;rule=01100110"), std::invalid_argument);
}

TEST_CASE("parse and print round trip") {
    std::mt19937_64 rng(20240811);
    for (int i = 0; i < 200; ++i) {
        Rule r = random_rule(rng);
        CHECK(parse_rule(print_rule(r)) == r);
        const std::string by_number = "p=" + std::to_string(r.alphabet) +
                                      ";L=" + std::to_string(r.left_radius) +
                                      ";R=" + std::to_string(r.right_radius) +
                                      ";rule=#" + wolfram_number(r);
        CHECK(parse_rule(by_number) == r);
    }
}

TEST_CASE("evaluate_local looks up windows") {
    Rule r102 = eca("01100110");
    CHECK(evaluate_local(r102, Word{0, 1, 0}) == 1);
    CHECK(evaluate_local(r102, Word{0, 1, 1}) == 0);

    Rule id = eca("11001100");
    for (Digit a : {0, 1}) {
        CHECK(evaluate_local(id, Word{0, a, 1}) == a);
    }
    CHECK_THROWS_AS(evaluate_local(r102, Word{0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(evaluate_local(r102, Word{0, 1, 2}), std::invalid_argument);
}

TEST_CASE("is_balanced counts output occurrences") {
    CHECK(is_balanced(eca("01100110")));
    CHECK_FALSE(is_balanced(eca("01101110")));  // rule 110, five ones

    int balanced = 0;
    for (std::uint64_t n = 0; n < 256; ++n) {
        std::vector<Digit> table(8);
        for (int t = 0; t < 8; ++t) table[t] = static_cast<Digit>((n >> t) & 1);
        if (is_balanced(make_rule(2, 1, 1, std::move(table)))) ++balanced;
    }
    CHECK(balanced == 70);
}

TEST_CASE("occurrence counts always sum to the table size") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 50; ++i) {
        Rule r = random_rule(rng);
        std::vector<std::uint64_t> counts(r.alphabet, 0);
        for (Digit d : r.table) ++counts[d];
        std::uint64_t sum = 0;
        for (auto c : counts) sum += c;
        CHECK(sum == r.table.size());
    }
}

TEST_CASE("single extension steps match the printed-string pictures") {
    // One bit-by-bit duplication (appending an ignored right argument) and
    // one whole-table duplication (prepending an ignored left argument).
    auto parse_digits = [](const std::string& s) {
        std::vector<Digit> table(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            table[s.size() - 1 - i] = static_cast<Digit>(s[i] - '0');
        }
        return table;
    };
    auto to_printed = [](const std::vector<Digit>& table) {
        std::string s;
        for (std::size_t i = table.size(); i-- > 0;) s.push_back(static_cast<char>('0' + table[i]));
        return s;
    };
    std::vector<Digit> start = parse_digits("00011101");
    CHECK(to_printed(detail::duplicate_entries(start, 2)) == "0000001111110011");
    CHECK(to_printed(detail::duplicate_whole(start, 2)) == "0001110100011101");
}

TEST_CASE("extend_to_symmetric balances the radii and leaves L == R rules alone") {
    Rule sym = eca("01100110");
    CHECK(extend_to_symmetric(sym) == sym);

    Rule lop = parse_rule("p=2;L=1;R=0;rule=0001");
    Rule ext = extend_to_symmetric(lop);
    CHECK(ext.left_radius == 1);
    CHECK(ext.right_radius == 1);
    CHECK(table_string(ext) == "00000011");

    Rule rop = parse_rule("p=2;L=0;R=1;rule=0001");
    Rule extr = extend_to_symmetric(rop);
    CHECK(extr.left_radius == 1);
    CHECK(extr.right_radius == 1);
    CHECK(table_string(extr) == "00010001");
}

TEST_CASE("extend_to_symmetric preserves the embedded window semantics") {
    std::mt19937_64 rng(0xC0FFEE);
    for (int i = 0; i < 1000; ++i) {
        Rule r = random_rule(rng, 3, 2);
        Rule ext = extend_to_symmetric(r);
        REQUIRE(ext.left_radius == ext.right_radius);
        const std::uint32_t offset = ext.left_radius - r.left_radius;
        for (int k = 0; k < 1000; ++k) {
            Word w = random_word(rng, ext.window_size(), r.alphabet);
            Word inner(w.begin() + offset, w.begin() + offset + r.window_size());
            CHECK(evaluate_local(ext, w) == evaluate_local(r, inner));
        }
    }
}

TEST_CASE("apply_global under the periodic boundary") {
    Rule id = eca("11001100");
    Rule r102 = eca("01100110");
    std::mt19937_64 rng(99);

    for (int i = 0; i < 20; ++i) {
        Word c = random_word(rng, 1 + rng() % 8, 2);
        CHECK(apply_global(id, c, Boundary::periodic()) == c);
    }
    CHECK(apply_global(r102, Word{1, 0}, Boundary::periodic()) == Word{1, 1});
    CHECK(apply_global(r102, Word{1, 1}, Boundary::periodic()) == Word{0, 0});
}

TEST_CASE("periodic application commutes with rotation") {
    std::mt19937_64 rng(123);
    for (int i = 0; i < 100; ++i) {
        Rule r = random_rule(rng, 3, 2);
        Word c = random_word(rng, 1 + rng() % 8, r.alphabet);
        const std::size_t k = rng() % c.size();
        CHECK(apply_global(r, rotated_left(c, k), Boundary::periodic()) ==
              rotated_left(apply_global(r, c, Boundary::periodic()), k));
    }
}

TEST_CASE("apply_global boundary handling") {
    Rule r102 = eca("01100110");

    SECTION("fixed fills are spliced in literally") {
        // 0 [1 0] 1 gives windows 010 -> 1 and 101 -> 1
        CHECK(apply_global(r102, Word{1, 0}, Boundary::fixed(Word{0}, Word{1})) == Word{1, 1});
    }
    SECTION("null boundary is all-zero fills") {
        Boundary null = Boundary::null_for(r102);
        CHECK(null.is_null());
        // extended word is 0 [1 1] 0: windows 011 -> 0, 110 -> 1
        CHECK(apply_global(r102, Word{1, 1}, null) == Word{0, 1});
    }
    SECTION("reflective mirrors the adjacent interior cells") {
        Rule id = eca("11001100");
        Word c{1, 0, 0, 1};
        CHECK(apply_global(id, c, Boundary::reflective()) == c);
        // extended word is 1 [1 0] 0: windows 110 -> 1, 100 -> 0
        CHECK(apply_global(r102, Word{1, 0}, Boundary::reflective()) == Word{1, 0});
    }
    SECTION("errors") {
        CHECK_THROWS_AS(apply_global(r102, Word{1}, Boundary::unbounded()),
                        std::invalid_argument);
        CHECK_THROWS_AS(apply_global(r102, Word{}, Boundary::periodic()), std::invalid_argument);
        CHECK_THROWS_AS(apply_global(r102, Word{1}, Boundary::fixed(Word{}, Word{0})),
                        std::invalid_argument);
        Rule wide = parse_rule("p=2;L=2;R=2;rule=#0");
        CHECK_THROWS_AS(apply_global(wide, Word{1}, Boundary::reflective()),
                        std::invalid_argument);
    }
}

TEST_CASE("mirrored swaps the radii and reverses windows") {
    std::mt19937_64 rng(5150);
    for (int i = 0; i < 50; ++i) {
        Rule r = random_rule(rng, 3, 2);
        Rule m = mirrored(r);
        CHECK(m.left_radius == r.right_radius);
        CHECK(m.right_radius == r.left_radius);
        Word w = random_word(rng, r.window_size(), r.alphabet);
        CHECK(evaluate_local(m, w) == evaluate_local(r, reversed(w)));
        CHECK(mirrored(m) == r);
    }
}

TEST_CASE("boundary grammar round trip") {
    Rule r = eca("01100110");
    CHECK(parse_boundary("global", r).kind == Boundary::Kind::unbounded);
    CHECK(parse_boundary("periodic", r) == Boundary::periodic());
    CHECK(parse_boundary("reflective", r) == Boundary::reflective());
    CHECK(parse_boundary("null", r) == Boundary::fixed(Word{0}, Word{0}));
    Boundary f = parse_boundary("fixed:1:0", r);
    CHECK(f.left_fill == Word{1});
    CHECK(f.right_fill == Word{0});
    CHECK(boundary_to_string(f) == "fixed:1:0");
    CHECK(boundary_to_string(Boundary::null_for(r)) == "null");
    CHECK_THROWS_AS(parse_boundary("fixed:11:0", r), std::invalid_argument);
    CHECK_THROWS_AS(parse_boundary("mirror", r), std::invalid_argument);
}
