#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "revca/cli.hpp"

using revca::cli::run;
using json = nlohmann::ordered_json;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult invoke(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string write_temp(const std::string& contents, const std::string& name) {
    std::string path = std::string("/tmp/revca_test_") + name + ".json";
    std::ofstream f(path);
    f << contents;
    return path;
}

} // namespace

TEST_CASE("decide emits the documented json verdict") {
    auto r = invoke({"decide", "--property", "injective", "--boundary", "periodic", "--format",
                     "json", "--no-timing", "p=2;L=1;R=1;rule=01100110"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["rule"]["wolfram"] == "102");
    CHECK(j["rule"]["table"] == "01100110");
    CHECK(j["property"] == "injective");
    CHECK(j["boundary"] == "periodic");
    CHECK(j["verdict"] == false);
    CHECK(j["witness"]["type"] == "periodic_pair");
    CHECK(j["witness"]["tuple_a"] == "0000");
    CHECK(j["witness"]["tuple_b"] == "1111");
    CHECK_FALSE(j.contains("elapsed_ms"));

    auto again = invoke({"decide", "--property", "injective", "--boundary", "periodic",
                         "--format", "json", "--no-timing", "p=2;L=1;R=1;rule=01100110"});
    CHECK(again.out == r.out);  // byte identical without timing
}

TEST_CASE("decide reports garden-of-eden witnesses") {
    auto r = invoke({"decide", "--property", "surjective", "--format", "json", "--no-timing",
                     "p=2;L=1;R=1;rule=00000100"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["boundary"] == "global");
    CHECK(j["verdict"] == false);
    CHECK(j["witness"]["type"] == "garden_of_eden");
    CHECK(j["witness"]["word"] == "11");
}

TEST_CASE("decide human output names the verdict") {
    auto r = invoke({"decide", "--property", "injective", "--boundary", "periodic",
                     "p=2;L=1;R=1;rule=01100110"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("NOT injective") != std::string::npos);
    CHECK(r.out.find("wolfram 102") != std::string::npos);
}

TEST_CASE("decide supports the baseline algorithms") {
    auto table = invoke({"decide", "--property", "injective", "--algorithm", "table", "--format",
                         "json", "--no-timing", "p=2;L=1;R=1;rule=11001100"});
    REQUIRE(table.code == 0);
    CHECK(json::parse(table.out)["verdict"] == true);

    auto unsimplified = invoke({"decide", "--property", "surjective", "--algorithm",
                                "unsimplified", "--format", "json", "--no-timing",
                                "p=2;L=1;R=1;rule=01100110"});
    REQUIRE(unsimplified.code == 0);
    CHECK(json::parse(unsimplified.out)["verdict"] == true);

    auto bad = invoke({"decide", "--property", "surjective", "--algorithm", "table",
                       "p=2;L=1;R=1;rule=01100110"});
    CHECK(bad.code == 2);

    auto oom = invoke({"decide", "--property", "injective", "--algorithm", "table",
                       "--memory-budget", "128", "p=2;L=1;R=1;rule=11001100"});
    CHECK(oom.code == 3);
}

TEST_CASE("survey subcommand emits csv with the fixed header") {
    auto r = invoke({"survey", "--m", "3", "--boundary", "periodic", "--property", "surjective",
                     "--no-timing", "--threads", "2"});
    REQUIRE(r.code == 0);
    std::istringstream lines(r.out);
    std::string header, row;
    std::getline(lines, header);
    std::getline(lines, row);
    CHECK(header == "m,boundary,property,count,total,seconds");
    CHECK(row == "3,periodic,surjective,6,256,0.000");

    auto budget = invoke({"survey", "--m", "5", "--boundary", "periodic", "--property",
                          "surjective"});
    CHECK(budget.code == 3);
}

TEST_CASE("extend duplicates table entries for lopsided rules") {
    auto r = invoke({"extend", "p=2;L=1;R=0;rule=0001"});
    REQUIRE(r.code == 0);
    CHECK(r.out == "p=2;L=1;R=1;rule=00000011\n");

    auto j = invoke({"extend", "--format", "json", "p=2;L=1;R=0;rule=0001"});
    REQUIRE(j.code == 0);
    json parsed = json::parse(j.out);
    CHECK(parsed["extended"]["table"] == "00000011");
    CHECK(parsed["extended_spec"] == "p=2;L=1;R=1;rule=00000011");
}

TEST_CASE("witness --verify round trips decide output") {
    auto decide = invoke({"decide", "--property", "injective", "--boundary", "periodic",
                          "--format", "json", "--no-timing", "p=2;L=1;R=1;rule=01100110"});
    REQUIRE(decide.code == 0);
    const std::string path = write_temp(decide.out, "periodic_pair");

    auto verify = invoke({"witness", "--verify", path});
    REQUIRE(verify.code == 0);
    CHECK(json::parse(verify.out)["witness_valid"] == true);

    json tampered = json::parse(decide.out);
    tampered["witness"]["predecessor_b"] = tampered["witness"]["predecessor_a"];
    const std::string bad_path = write_temp(tampered.dump(), "tampered");
    auto invalid = invoke({"witness", "--verify", bad_path});
    REQUIRE(invalid.code == 0);
    CHECK(json::parse(invalid.out)["witness_valid"] == false);

    std::remove(path.c_str());
    std::remove(bad_path.c_str());
}

TEST_CASE("witness --verify covers bounded garden-of-eden words") {
    auto decide = invoke({"decide", "--property", "surjective", "--boundary", "null", "--format",
                          "json", "--no-timing", "p=2;L=1;R=1;rule=00000100"});
    REQUIRE(decide.code == 0);
    json j = json::parse(decide.out);
    REQUIRE(j["verdict"] == false);
    const std::string path = write_temp(decide.out, "goe_null");
    auto verify = invoke({"witness", "--verify", path});
    REQUIRE(verify.code == 0);
    CHECK(json::parse(verify.out)["witness_valid"] == true);
    std::remove(path.c_str());
}

TEST_CASE("invalid inputs exit with code 2") {
    CHECK(invoke({"decide", "--property", "injective", "p=2;L=1;R=1;rule=0110"}).code == 2);
    CHECK(invoke({"decide", "--property", "wrong", "p=2;L=1;R=1;rule=01100110"}).code == 2);
    CHECK(invoke({"decide", "p=2;L=1;R=1;rule=01100110"}).code == 2);
    CHECK(invoke({"unknown-subcommand"}).code == 2);
    CHECK(invoke({"witness", "--verify", "/tmp/revca_does_not_exist.json"}).code == 2);
    const std::string garbage = write_temp("{not json", "garbage");
    CHECK(invoke({"witness", "--verify", garbage}).code == 2);
    std::remove(garbage.c_str());
    CHECK(invoke({"witness", "/tmp/whatever.json"}).code == 2);  // missing --verify
}

TEST_CASE("bench subcommand emits a json line") {
    auto r = invoke({"bench", "--m", "3", "--sample", "5", "--seed", "11"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["kind"] == "bench");
    CHECK(j["sample"] == 5);
    CHECK(j["verdict_mismatches"] == 0);

    auto stats = invoke({"bench", "--m", "4", "--sample", "100", "--seed", "11", "--node-stats"});
    REQUIRE(stats.code == 0);
    json s = json::parse(stats.out);
    CHECK(s["kind"] == "node_stats");
    CHECK(s["sample"] == 100);
    CHECK(s.contains("mean_below_bound"));
}

TEST_CASE("help is available") {
    auto r = invoke({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("decide") != std::string::npos);
}
