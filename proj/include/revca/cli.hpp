#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "revca/amoroso.hpp"
#include "revca/injectivity.hpp"
#include "revca/oracle.hpp"
#include "revca/rule.hpp"
#include "revca/surjectivity.hpp"
#include "revca/survey.hpp"

namespace revca::cli {

using json = nlohmann::ordered_json;

// Exit codes: 0 for any completed decision (including negative verdicts),
// 2 for invalid input, 3 for budget exhaustion.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitBudget = 3;

inline json rule_to_json(const Rule& r) {
    json j;
    j["p"] = r.alphabet;
    j["left_radius"] = r.left_radius;
    j["right_radius"] = r.right_radius;
    if (r.alphabet <= 36) j["table"] = table_string(r);
    j["wolfram"] = wolfram_number(r);
    return j;
}

inline Rule rule_from_json(const json& j) {
    const std::uint32_t p = j.at("p").get<std::uint32_t>();
    const std::uint32_t left = j.at("left_radius").get<std::uint32_t>();
    const std::uint32_t right = j.at("right_radius").get<std::uint32_t>();
    const std::uint64_t size = checked_pow(p, left + 1 + right, kMaxTableSize);
    std::vector<Digit> table;
    if (j.contains("table")) {
        const std::string s = j.at("table").get<std::string>();
        if (s.size() != size) throw std::invalid_argument("rule table length must be p^m");
        table.resize(size);
        for (std::uint64_t i = 0; i < size; ++i) {
            table[size - 1 - i] = detail::char_to_digit(s[i], p);
        }
    } else {
        table = detail::table_from_wolfram(j.at("wolfram").get<std::string>(), p, size);
    }
    return make_rule(p, left, right, std::move(table));
}

inline json witness_to_json(const Witness& w) {
    if (const auto* goe = std::get_if<GardenOfEdenWitness>(&w)) {
        json j;
        j["type"] = "garden_of_eden";
        j["word"] = word_to_string(goe->word);
        j["length"] = goe->word.size();
        return j;
    }
    if (const auto* pp = std::get_if<PeriodicPairWitness>(&w)) {
        json j;
        j["type"] = "periodic_pair";
        j["length"] = pp->predecessor_a.size();
        j["predecessor_a"] = word_to_string(pp->predecessor_a);
        j["predecessor_b"] = word_to_string(pp->predecessor_b);
        j["image"] = word_to_string(pp->image);
        j["tuple_a"] = word_to_string(pp->tuple_a);
        j["tuple_b"] = word_to_string(pp->tuple_b);
        j["path"] = word_to_string(pp->path);
        return j;
    }
    if (const auto* c = std::get_if<CollisionWitness>(&w)) {
        json j;
        j["type"] = "collision";
        j["predecessor_a"] = word_to_string(c->predecessor_a);
        j["predecessor_b"] = word_to_string(c->predecessor_b);
        j["image"] = word_to_string(c->image);
        return j;
    }
    if (const auto* rep = std::get_if<ReplaceableWitness>(&w)) {
        json j;
        j["type"] = "replaceable";
        j["word_a"] = word_to_string(rep->word_a);
        j["word_b"] = word_to_string(rep->word_b);
        return j;
    }
    return json(nullptr);
}

inline Witness witness_from_json(const json& j, std::uint32_t p) {
    if (j.is_null()) return std::monostate{};
    auto word = [&](const char* key) {
        return word_from_string(j.at(key).get<std::string>(), p);
    };
    const std::string type = j.at("type").get<std::string>();
    if (type == "garden_of_eden") return GardenOfEdenWitness{word("word")};
    if (type == "periodic_pair") {
        return PeriodicPairWitness{word("predecessor_a"), word("predecessor_b"), word("image"),
                                   word("tuple_a"),       word("tuple_b"),       word("path")};
    }
    if (type == "collision") {
        return CollisionWitness{word("predecessor_a"), word("predecessor_b"), word("image")};
    }
    if (type == "replaceable") return ReplaceableWitness{word("word_a"), word("word_b")};
    throw std::invalid_argument("unknown witness type '" + type + "'");
}

inline json verdict_to_json(const Rule& r, const Verdict& v, bool with_timing,
                            double elapsed_ms) {
    json j;
    j["rule"] = rule_to_json(r);
    j["property"] = property_to_string(v.property);
    j["boundary"] = boundary_to_string(v.boundary);
    j["verdict"] = v.holds;
    j["witness"] = witness_to_json(v.witness);
    j["stats"] = {{"nodes_created", v.stats.nodes_created},
                  {"nodes_expanded", v.stats.nodes_expanded},
                  {"tuples", v.stats.tuples}};
    j["note"] = v.note;
    if (with_timing) j["elapsed_ms"] = elapsed_ms;
    return j;
}

namespace detail_cli {

inline std::string witness_human(const Witness& w) {
    if (const auto* goe = std::get_if<GardenOfEdenWitness>(&w)) {
        return "garden-of-eden word " + word_to_string(goe->word) + " (length " +
               std::to_string(goe->word.size()) + ")";
    }
    if (const auto* pp = std::get_if<PeriodicPairWitness>(&w)) {
        return "periodic predecessors " + word_to_string(pp->predecessor_a) + " and " +
               word_to_string(pp->predecessor_b) + " share image " + word_to_string(pp->image) +
               " (tuples " + word_to_string(pp->tuple_a) + ", " + word_to_string(pp->tuple_b) +
               ")";
    }
    if (const auto* c = std::get_if<CollisionWitness>(&w)) {
        return "configurations " + word_to_string(c->predecessor_a) + " and " +
               word_to_string(c->predecessor_b) + " share image " + word_to_string(c->image);
    }
    if (const auto* rep = std::get_if<ReplaceableWitness>(&w)) {
        return "replaceable words " + word_to_string(rep->word_a) + " and " +
               word_to_string(rep->word_b);
    }
    return "none";
}

inline void print_verdict_human(std::ostream& out, const Rule& r, const Verdict& v,
                                bool with_timing, double elapsed_ms) {
    out << "rule: " << print_rule(r) << " (wolfram " << wolfram_number(r) << ")\n";
    out << "property: " << property_to_string(v.property)
        << ", boundary: " << boundary_to_string(v.boundary) << "\n";
    out << "verdict: " << (v.holds ? "" : "NOT ") << property_to_string(v.property) << "\n";
    if (has_witness(v.witness)) out << "witness: " << witness_human(v.witness) << "\n";
    if (!v.note.empty()) out << "note: " << v.note << "\n";
    out << "stats: nodes_created=" << v.stats.nodes_created
        << " nodes_expanded=" << v.stats.nodes_expanded << " tuples=" << v.stats.tuples << "\n";
    if (with_timing) out << "elapsed_ms: " << elapsed_ms << "\n";
}

struct DecideArgs {
    std::string rule_spec;
    std::string property;
    std::string boundary = "global";
    std::string algorithm = "tree";
    std::string format = "human";
    bool no_timing = false;
    bool continue_past_periodic = false;
    std::uint64_t memory_budget = UINT64_MAX;
};

inline int run_decide(const DecideArgs& a, std::ostream& out, std::ostream& err) {
    Rule rule = parse_rule(a.rule_spec);
    Boundary boundary = parse_boundary(a.boundary, rule);
    const Property property =
        a.property == "surjective" ? Property::surjective : Property::injective;
    InjectivityOptions tree_opts;
    tree_opts.continue_past_periodic = a.continue_past_periodic;
    tree_opts.memory_budget_bytes = a.memory_budget;

    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    if (a.algorithm == "table") {
        if (property != Property::injective || (boundary.kind != Boundary::Kind::unbounded &&
                                                boundary.kind != Boundary::Kind::periodic)) {
            err << "the table algorithm decides global/periodic injectivity only\n";
            return kExitInvalid;
        }
        AmorosoOptions opts;
        opts.memory_budget_bytes = a.memory_budget;
        TableResult tr = decide_injective_table(rule, opts);
        if (!tr.verdict) {
            err << "memory budget exceeded (peak " << tr.bytes_peak << " bytes)\n";
            return kExitBudget;
        }
        v = *tr.verdict;
        v.boundary = boundary;
    } else if (a.algorithm == "unsimplified") {
        if (property != Property::surjective || boundary.kind != Boundary::Kind::unbounded) {
            err << "the unsimplified tree decides global surjectivity only\n";
            return kExitInvalid;
        }
        v = decide_surjective_unsimplified(rule);
    } else if (a.algorithm == "tree") {
        if (property == Property::surjective) {
            switch (boundary.kind) {
                case Boundary::Kind::unbounded: v = decide_surjective_global(rule); break;
                case Boundary::Kind::fixed:
                    v = decide_surjective_fixed(rule, boundary.left_fill, boundary.right_fill);
                    break;
                case Boundary::Kind::periodic:
                    v = decide_surjective_periodic(rule, tree_opts);
                    break;
                case Boundary::Kind::reflective: v = decide_surjective_reflective(rule); break;
            }
        } else {
            if (boundary.kind == Boundary::Kind::unbounded) {
                v = decide_injective_global(rule, tree_opts);
            } else {
                v = decide_injective_bounded(rule, boundary, tree_opts);
            }
        }
    } else {
        err << "unknown algorithm '" << a.algorithm << "'\n";
        return kExitInvalid;
    }
    const double elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    if (a.format == "json") {
        out << verdict_to_json(rule, v, !a.no_timing, elapsed_ms).dump() << "\n";
    } else {
        print_verdict_human(out, rule, v, !a.no_timing, elapsed_ms);
    }
    return kExitOk;
}

} // namespace detail_cli

inline int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"decision tools for surjectivity and reversibility of 1d cellular automata",
                 "revca"};
    app.require_subcommand(1);

    detail_cli::DecideArgs decide_args;
    auto* decide = app.add_subcommand("decide", "decide a property of one rule");
    decide->add_option("rule", decide_args.rule_spec, "rule spec, e.g. p=2;L=1;R=1;rule=01100110")
        ->required();
    decide->add_option("--property", decide_args.property, "surjective | injective")
        ->required()
        ->check(CLI::IsMember({"surjective", "injective"}));
    decide->add_option("--boundary", decide_args.boundary,
                       "global | null | fixed:<leftfill>:<rightfill> | periodic | reflective");
    decide->add_option("--algorithm", decide_args.algorithm, "tree | table | unsimplified")
        ->check(CLI::IsMember({"tree", "table", "unsimplified"}));
    decide->add_option("--format", decide_args.format, "human | json")
        ->check(CLI::IsMember({"human", "json"}));
    decide->add_flag("--no-timing", decide_args.no_timing, "omit elapsed time from the output");
    decide->add_flag("--continue-past-periodic", decide_args.continue_past_periodic,
                     "diagnostic: ignore periodic-pair terminations");
    decide->add_option("--memory-budget", decide_args.memory_budget, "budget in bytes");

    struct {
        std::uint32_t m = 3;
        std::uint32_t p = 2;
        std::int64_t left = -1;
        std::string boundary = "periodic";
        std::string property = "surjective";
        bool balanced_only = false;
        std::uint32_t threads = 1;
        std::string format = "csv";
        bool no_timing = false;
        bool with_rules = false;
        bool no_header = false;
    } survey_args;
    auto* survey = app.add_subcommand("survey", "count qualifying rules over a rule space");
    survey->add_option("--m", survey_args.m, "neighborhood size")->required();
    survey->add_option("--p", survey_args.p, "alphabet size");
    survey->add_option("--L", survey_args.left, "left radius (default floor((m-1)/2))");
    survey->add_option("--boundary", survey_args.boundary, "boundary spec");
    survey->add_option("--property", survey_args.property, "surjective | injective")
        ->check(CLI::IsMember({"surjective", "injective"}));
    survey->add_flag("--balanced-only", survey_args.balanced_only, "scan balanced rules only");
    survey->add_option("--threads", survey_args.threads, "worker threads for full-space scans");
    survey->add_option("--format", survey_args.format, "csv | json | human")
        ->check(CLI::IsMember({"csv", "json", "human"}));
    survey->add_flag("--no-timing", survey_args.no_timing, "zero the seconds column");
    survey->add_flag("--with-rules", survey_args.with_rules, "list qualifying Wolfram numbers");
    survey->add_flag("--no-header", survey_args.no_header, "omit the CSV header line");

    struct {
        std::uint32_t m = 4;
        std::uint32_t p = 2;
        std::uint64_t sample = 100;
        std::uint64_t seed = 0;
        double time_budget = 0.0;
        std::uint64_t memory_budget = UINT64_MAX;
        bool node_stats_only = false;
        std::string format = "jsonl";
    } bench_args;
    auto* bench = app.add_subcommand("bench", "compare the injectivity deciders");
    bench->add_option("--m", bench_args.m, "neighborhood size")->required();
    bench->add_option("--p", bench_args.p, "alphabet size");
    bench->add_option("--sample", bench_args.sample, "number of sampled balanced rules");
    bench->add_option("--seed", bench_args.seed, "sampling seed");
    bench->add_option("--time-budget", bench_args.time_budget, "seconds, 0 for unlimited");
    bench->add_option("--memory-budget", bench_args.memory_budget, "bytes per decision");
    bench->add_flag("--node-stats", bench_args.node_stats_only,
                    "emit tree tuple statistics instead of timings");
    bench->add_option("--format", bench_args.format, "jsonl | human")
        ->check(CLI::IsMember({"jsonl", "human"}));

    struct {
        std::string file = "-";
        bool verify = false;
    } witness_args;
    auto* witness = app.add_subcommand("witness", "verify a witness produced by decide");
    witness->add_flag("--verify", witness_args.verify, "verify the witness in the input");
    witness->add_option("file", witness_args.file, "decide JSON output, or - for stdin");

    struct {
        std::string rule_spec;
        std::string format = "human";
    } extend_args;
    auto* extend = app.add_subcommand("extend", "extend a rule to a symmetric shape");
    extend->add_option("rule", extend_args.rule_spec, "rule spec")->required();
    extend->add_option("--format", extend_args.format, "human | json")
        ->check(CLI::IsMember({"human", "json"}));

    try {
        std::vector<std::string> args(argv.rbegin(), argv.rend());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return kExitInvalid;
    }

    try {
        if (*decide) return detail_cli::run_decide(decide_args, out, err);

        if (*survey) {
            SurveyParams params;
            params.m = survey_args.m;
            params.p = survey_args.p;
            if (survey_args.left >= 0) {
                params.left_radius = static_cast<std::uint32_t>(survey_args.left);
            }
            const std::uint32_t left =
                params.left_radius.value_or(default_left_radius(params.m));
            if (left >= params.m) {
                err << "left radius must be below m\n";
                return kExitInvalid;
            }
            Rule shape_probe = rule_from_index(0, params.p, left, params.m - 1 - left);
            params.boundary = parse_boundary(survey_args.boundary, shape_probe);
            params.property = survey_args.property == "surjective" ? Property::surjective
                                                                   : Property::injective;
            params.balanced_only = survey_args.balanced_only;
            params.threads = survey_args.threads;
            params.collect_rules = survey_args.with_rules;
            SurveyRow row = survey_counts(params);
            if (survey_args.format == "csv") {
                if (!survey_args.no_header) out << survey_csv_header() << "\n";
                out << to_csv_line(row, !survey_args.no_timing) << "\n";
            } else if (survey_args.format == "json") {
                out << to_json(row, !survey_args.no_timing).dump() << "\n";
            } else {
                out << row.count << " of " << row.total << " rules are " << row.property
                    << " under the " << row.boundary << " boundary (m=" << row.m << ")\n";
            }
            return kExitOk;
        }

        if (*bench) {
            if (bench_args.node_stats_only) {
                NodeStats stats =
                    node_stats(bench_args.m, bench_args.p, bench_args.sample, bench_args.seed);
                if (bench_args.format == "human") {
                    out << "m=" << stats.m << " sample=" << stats.sample
                        << " mean_tuples=" << stats.mean_tuples << " bound=" << stats.bound
                        << "\n";
                } else {
                    out << to_json(stats).dump() << "\n";
                }
                return kExitOk;
            }
            BenchRecord rec =
                bench_compare(bench_args.m, bench_args.p, bench_args.sample, bench_args.seed,
                              bench_args.time_budget, bench_args.memory_budget);
            if (bench_args.format == "human") {
                out << "m=" << rec.m << " sample=" << rec.attempted
                    << " table_mean_ms=" << rec.table_mean_ms
                    << " tree_mean_ms=" << rec.tree_mean_ms << " ratio=" << rec.time_ratio
                    << " table_oom=" << rec.table_oom << "\n";
            } else {
                out << to_json(rec).dump() << "\n";
            }
            return kExitOk;
        }

        if (*witness) {
            if (!witness_args.verify) {
                err << "witness requires --verify\n";
                return kExitInvalid;
            }
            std::string text;
            if (witness_args.file == "-") {
                std::stringstream buffer;
                buffer << std::cin.rdbuf();
                text = buffer.str();
            } else {
                std::ifstream in(witness_args.file);
                if (!in) {
                    err << "cannot open '" << witness_args.file << "'\n";
                    return kExitInvalid;
                }
                std::stringstream buffer;
                buffer << in.rdbuf();
                text = buffer.str();
            }
            json j;
            try {
                j = json::parse(text);
            } catch (const json::exception& e) {
                err << "invalid JSON: " << e.what() << "\n";
                return kExitInvalid;
            }
            Rule rule = rule_from_json(j.at("rule"));
            Verdict v;
            v.property = j.at("property").get<std::string>() == "surjective"
                             ? Property::surjective
                             : Property::injective;
            v.boundary = parse_boundary(j.at("boundary").get<std::string>(), rule);
            v.holds = j.at("verdict").get<bool>();
            v.witness = witness_from_json(j.at("witness"), rule.alphabet);
            if (!has_witness(v.witness)) {
                err << "no witness to verify\n";
                return kExitInvalid;
            }
            const bool ok = verify_witness(rule, v);
            json result;
            result["rule"] = rule_to_json(rule);
            result["property"] = j.at("property");
            result["boundary"] = j.at("boundary");
            result["witness_valid"] = ok;
            out << result.dump() << "\n";
            return kExitOk;
        }

        if (*extend) {
            Rule rule = parse_rule(extend_args.rule_spec);
            Rule ext = extend_to_symmetric(rule);
            if (extend_args.format == "json") {
                json j;
                j["rule"] = rule_to_json(rule);
                j["extended"] = rule_to_json(ext);
                j["extended_spec"] = print_rule(ext);
                out << j.dump() << "\n";
            } else {
                out << print_rule(ext) << "\n";
            }
            return kExitOk;
        }
    } catch (const budget_error& e) {
        err << "budget exhausted: " << e.what() << "\n";
        return kExitBudget;
    } catch (const json::exception& e) {
        err << "invalid input: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::overflow_error& e) {
        err << "invalid input: " << e.what() << "\n";
        return kExitInvalid;
    }
    return kExitInvalid;
}

} // namespace revca::cli
