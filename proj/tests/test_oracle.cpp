#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "revca/oracle.hpp"

using namespace revca;

namespace {

Rule eca(const std::string& table) { return parse_rule("p=2;L=1;R=1;rule=" + table); }

const Rule kIdentity = eca("11001100");   // 204
const Rule kXorRight = eca("01100110");   // 102, f = center xor right
const Rule kShift = eca("10101010");      // 170, f = right neighbor
const Rule kSpark = eca("00000100");      // 4, f = 1 only on 010

} // namespace

TEST_CASE("bounded surjectivity oracle") {
    CHECK(oracle_surjective_bounded(kIdentity, Boundary::periodic(), 5).holds);

    auto r = oracle_surjective_bounded(kXorRight, Boundary::periodic(), 2);
    CHECK_FALSE(r.holds);
    REQUIRE(r.unreached.has_value());
    CHECK(*r.unreached == Word{0, 1});  // images of the four cycles are only 00 and 11

    auto s = oracle_surjective_bounded(kSpark, Boundary::null_for(kSpark), 2);
    CHECK_FALSE(s.holds);
    REQUIRE(s.unreached.has_value());
    CHECK(*s.unreached == Word{1, 1});
}

TEST_CASE("bounded injectivity oracle") {
    auto r = oracle_injective_bounded(kXorRight, Boundary::periodic(), 2);
    CHECK_FALSE(r.holds);
    REQUIRE(r.collision.has_value());
    CHECK(r.collision->first == Word{0, 1});
    CHECK(r.collision->second == Word{1, 0});

    for (std::uint32_t n = 1; n <= 10; ++n) {
        CHECK(oracle_injective_bounded(kShift, Boundary::periodic(), n).holds);
    }
    CHECK(oracle_injective_bounded(kIdentity, Boundary::reflective(), 4).holds);
}

TEST_CASE("oracle budget guard") {
    CHECK_THROWS_AS(oracle_surjective_bounded(kIdentity, Boundary::periodic(), 25), budget_error);
    CHECK_THROWS_AS(oracle_injective_bounded(kIdentity, Boundary::periodic(), 25), budget_error);
}

TEST_CASE("one-sided global surjectivity scan") {
    CHECK(oracle_globally_surjective_up_to(kXorRight, 8).holds);
    CHECK(oracle_globally_surjective_up_to(kIdentity, 8).holds);

    auto r = oracle_globally_surjective_up_to(kSpark, 2);
    CHECK_FALSE(r.holds);
    REQUIRE(r.unreached.has_value());
    CHECK(*r.unreached == Word{1, 1});
}

TEST_CASE("verify_witness accepts real witnesses and rejects tampered ones") {
    SECTION("periodic pair for rule 102") {
        Verdict v;
        v.property = Property::injective;
        v.boundary = Boundary::unbounded();
        v.holds = false;
        PeriodicPairWitness w;
        w.predecessor_a = {0};
        w.predecessor_b = {1};
        w.image = {0};
        w.tuple_a = {0, 0, 0, 0};
        w.tuple_b = {1, 1, 1, 1};
        w.path = {0};
        v.witness = w;
        CHECK(verify_witness(kXorRight, v));

        PeriodicPairWitness tampered = w;
        tampered.predecessor_b = {0};  // no longer distinct
        v.witness = tampered;
        CHECK_FALSE(verify_witness(kXorRight, v));

        tampered = w;
        tampered.image = {1};
        v.witness = tampered;
        CHECK_FALSE(verify_witness(kXorRight, v));
    }

    SECTION("garden of eden for rule 4, global") {
        Verdict v;
        v.property = Property::surjective;
        v.boundary = Boundary::unbounded();
        v.holds = false;
        v.witness = GardenOfEdenWitness{Word{1, 1}};
        CHECK(verify_witness(kSpark, v));

        v.witness = GardenOfEdenWitness{Word{0, 1}};  // 00010 maps onto 01
        CHECK_FALSE(verify_witness(kSpark, v));
    }

    SECTION("collision under a bounded boundary") {
        Verdict v;
        v.property = Property::injective;
        v.boundary = Boundary::periodic();
        v.holds = false;
        v.witness = CollisionWitness{Word{0, 1}, Word{1, 0}, Word{1, 1}};
        CHECK(verify_witness(kXorRight, v));

        v.witness = CollisionWitness{Word{0, 1}, Word{1, 0}, Word{0, 1}};
        CHECK_FALSE(verify_witness(kXorRight, v));
    }

    SECTION("replaceable pair for rule 4") {
        Verdict v;
        v.property = Property::injective;
        v.boundary = Boundary::unbounded();
        v.holds = false;
        // both have sliding image 000, equal outer cells
        v.witness = ReplaceableWitness{Word{0, 0, 0, 1, 1}, Word{0, 0, 1, 1, 1}};
        CHECK(verify_witness(kSpark, v));

        v.witness = ReplaceableWitness{Word{0, 0, 0, 1, 1}, Word{0, 0, 0, 1, 1}};
        CHECK_FALSE(verify_witness(kSpark, v));
        v.witness = ReplaceableWitness{Word{0, 0, 1}, Word{0, 1, 1}};  // too short
        CHECK_FALSE(verify_witness(kSpark, v));
    }

    SECTION("a verdict without a witness is malformed") {
        Verdict v;
        v.holds = true;
        CHECK_THROWS_AS(verify_witness(kXorRight, v), std::invalid_argument);
    }
}

TEST_CASE("periodic image sets are rotation closed") {
    std::mt19937_64 rng(31337);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<Digit> table(8);
        for (auto& d : table) d = static_cast<Digit>(rng() % 2);
        Rule r = make_rule(2, 1, 1, std::move(table));
        for (std::uint32_t n = 1; n <= 6; ++n) {
            std::vector<bool> reached(std::size_t{1} << n, false);
            for (std::uint64_t c = 0; c < (std::uint64_t{1} << n); ++c) {
                Word config = index_to_word(c, n, 2);
                reached[word_to_index(apply_global(r, config, Boundary::periodic()), 2)] = true;
            }
            for (std::uint64_t i = 0; i < reached.size(); ++i) {
                if (!reached[i]) continue;
                Word w = index_to_word(i, n, 2);
                CHECK(reached[word_to_index(rotated_left(w, 1), 2)]);
            }
        }
    }
}

TEST_CASE("reflective images of mirror-symmetric rules are mirror closed") {
    std::mt19937_64 rng(424242);
    for (int trial = 0; trial < 30; ++trial) {
        // Force f(abc) = f(cba).
        std::vector<Digit> table(8);
        for (std::uint64_t t = 0; t < 8; ++t) {
            Word w = index_to_word(t, 3, 2);
            std::uint64_t rev = word_to_index(reversed(w), 2);
            if (rev < t) {
                table[t] = table[rev];
            } else {
                table[t] = static_cast<Digit>(rng() % 2);
            }
        }
        Rule r = make_rule(2, 1, 1, std::move(table));
        for (std::uint32_t n = 1; n <= 6; ++n) {
            for (std::uint64_t c = 0; c < (std::uint64_t{1} << n); ++c) {
                Word config = index_to_word(c, n, 2);
                CHECK(apply_global(r, reversed(config), Boundary::reflective()) ==
                      reversed(apply_global(r, config, Boundary::reflective())));
            }
        }
    }
}

TEST_CASE("bounded surjectivity equals bounded injectivity length by length") {
    // Counting argument: the bounded map sends S^n to S^n.
    std::mt19937_64 rng(777);
    const std::vector<Boundary> boundaries = {
        Boundary::periodic(),
        Boundary::reflective(),
        Boundary::fixed(Word{0}, Word{0}),
        Boundary::fixed(Word{1}, Word{0}),
    };
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<Digit> table(8);
        for (auto& d : table) d = static_cast<Digit>(rng() % 2);
        Rule r = make_rule(2, 1, 1, std::move(table));
        for (const auto& b : boundaries) {
            for (std::uint32_t n = 1; n <= 6; ++n) {
                CHECK(oracle_surjective_bounded(r, b, n).holds ==
                      oracle_injective_bounded(r, b, n).holds);
            }
        }
    }
}

TEST_CASE("oracle_report aggregates per-length checks") {
    auto report = oracle_report(kXorRight, Boundary::periodic(), 1, 6);
    CHECK(report.entries.size() == 6);
    CHECK_FALSE(report.all_surjective());
    CHECK_FALSE(report.all_injective());
    for (const auto& e : report.entries) {
        CHECK(e.defined);
        CHECK(e.surjective == e.injective);
        if (!e.surjective) {
            REQUIRE(e.unreached.has_value());
            Word cfg = *e.unreached;
            bool reachable = false;
            for (std::uint64_t c = 0; c < checked_pow(2, e.n); ++c) {
                if (apply_global(kXorRight, index_to_word(c, e.n, 2), Boundary::periodic()) ==
                    cfg) {
                    reachable = true;
                }
            }
            CHECK_FALSE(reachable);
        }
    }

    Rule wide = parse_rule("p=2;L=2;R=2;rule=#0");
    auto wide_report = oracle_report(wide, Boundary::reflective(), 1, 3);
    CHECK_FALSE(wide_report.entries[0].defined);
    CHECK(wide_report.entries[1].defined);
}
