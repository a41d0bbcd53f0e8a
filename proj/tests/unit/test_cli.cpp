#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "sdcc/cli.hpp"
#include "sdcc/io.hpp"

using namespace sdcc;
namespace fs = std::filesystem;

namespace {

const std::string kFixtures = SDCC_FIXTURE_DIR;

std::string fixture(const std::string& name) { return kFixtures + "/" + name; }

struct Outcome {
    int code = 0;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    args.insert(args.begin(), "sdcc");
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("sdcc_cli_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

Json result_of(const Outcome& o) {
    REQUIRE_MESSAGE(o.code == 0, o.err);
    return Json::parse(o.out).at("result");
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("coverage subcommand") {
    const auto single = result_of(run({"coverage", "--schema", fixture("binary3.schema.json"), "--data",
                                       fixture("single.csv"), "-t", "2"}));
    CHECK(single["cc"]["ratio"] == "3/12");
    CHECK(single["covered_count"] == 3);
    CHECK(single["universe_count"] == 12);

    const auto full = result_of(
        run({"coverage", "--schema", fixture("binary3.schema.json"), "--data", fixture("full_factorial.csv")}));
    CHECK(full["cc"]["value"] == 1.0);

    const auto digits = result_of(run({"coverage", "--schema", fixture("digits.schema.json"), "--data",
                                       fixture("digits_source.csv"), "--strength", "2"}));
    CHECK(digits["universe_count"] == 468);
}

TEST_CASE("sdcc subcommand") {
    const auto schema = fixture("binary3.schema.json");
    const auto same = result_of(run({"sdcc", "--schema", schema, "--target", fixture("full_factorial.csv"),
                                     "--source", fixture("full_factorial.csv")}));
    CHECK(same["sdcc"]["value"] == 0.0);

    const auto disjoint = result_of(run({"sdcc", "--schema", schema, "--target", fixture("disjoint_target.csv"),
                                         "--source", fixture("disjoint_source.csv")}));
    CHECK(disjoint["sdcc"]["value"] == 1.0);

    const auto constructed = result_of(run({"sdcc", "--schema", schema, "--target",
                                            fixture("constructed_target.csv"), "--source",
                                            fixture("constructed_source.csv")}));
    CHECK(constructed["sdcc"]["ratio"] == "2/3");
    CHECK(constructed["missing_combinations"] == Json::parse(R"([{"a": "0", "c": "1"}, {"b": "1", "c": "1"}])"));
    CHECK(constructed["per_record_covered"]["t0"] == false);
}

TEST_CASE("documents carry provenance") {
    const auto o = run({"coverage", "--schema", fixture("binary3.schema.json"), "--data", fixture("single.csv")});
    REQUIRE(o.code == 0);
    const Json doc = Json::parse(o.out);
    const Json& p = doc.at("provenance");
    CHECK(p["tool"]["name"] == "sdcc");
    CHECK(p["tool"]["version"] == "0.1.0");
    CHECK(p["command"] == "coverage");
    CHECK(p["flags"]["t"] == 2);
    CHECK(p["inputs"]["data"]["sha256"] == sha256_hex(read_file(fixture("single.csv"))));
    CHECK(p["inputs"]["schema"]["path"] == fixture("binary3.schema.json"));
    // stable key order
    CHECK(doc.begin().key() == "provenance");
}

TEST_CASE("partition subcommand") {
    TempDir tmp;
    const auto schema = fixture("binary3.schema.json");
    const auto summary = result_of(run({"partition", "--schema", schema, "--target",
                                        fixture("constructed_target.csv"), "--source",
                                        fixture("constructed_source.csv"), "--out", tmp / "p.csv"}));
    CHECK(summary["not_covered_count"] == 1);
    CHECK(read_file(tmp / "p.csv") == "id,status,missing_count\nt0,not_covered,2\n");

    const auto relaxed = run({"partition", "--schema", fixture("digits.schema.json"), "--target",
                              fixture("digits_target.csv"), "--source", fixture("digits_source.csv"), "--mode",
                              "relaxed", "--region-factor", "region", "--out", tmp / "r.csv", "--summary",
                              tmp / "r.json"});
    REQUIRE(relaxed.code == 0);
    CHECK(relaxed.out.empty());
    const Json r = Json::parse(read_file(tmp / "r.json")).at("result");
    CHECK(r["not_covered_count"].get<int>() >= r["strict_not_covered_count"].get<int>());
    const Table t = parse_csv(read_file(tmp / "r.csv"));
    CHECK(t.header == std::vector<std::string>{"id", "status", "missing_count", "region"});
    CHECK(t.rows.size() == 80);

    CHECK(run({"partition", "--schema", schema, "--target", fixture("single.csv"), "--source",
               fixture("single.csv"), "--mode", "relaxed", "--out", tmp / "x.csv"})
              .code == 3);
}

TEST_CASE("select subcommand") {
    TempDir tmp;
    const std::vector<std::string> base{"select", "--schema", fixture("digits.schema.json"), "--pool",
                                        fixture("digits_pool.csv"), "--source", fixture("digits_source.csv"),
                                        "--n-random", "10", "--n-not-covered", "5", "--seed", "3"};
    auto first = base;
    first.insert(first.end(), {"--out", tmp / "a.csv", "--summary", tmp / "a.json"});
    auto second = base;
    second.insert(second.end(), {"--out", tmp / "b.csv", "--summary", tmp / "b.json"});
    REQUIRE(run(first).code == 0);
    REQUIRE(run(second).code == 0);
    CHECK(read_file(tmp / "a.csv") == read_file(tmp / "b.csv"));
    const Table t = parse_csv(read_file(tmp / "a.csv"));
    CHECK(t.header == std::vector<std::string>{"id", "stratum"});
    REQUIRE(t.rows.size() == 15);
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(t.rows[i][1] == "not_covered");
    const Json s = Json::parse(read_file(tmp / "a.json")).at("result");
    CHECK(s["batch_size"] == 15);
    CHECK(s["seed"] == 3);

    auto too_many = base;
    too_many[8] = "400";
    too_many.insert(too_many.end(), {"--out", tmp / "c.csv"});
    const auto o = run(too_many);
    CHECK(o.code == 4);
    CHECK(o.err.find("error[selection]") != std::string::npos);
    CHECK_FALSE(fs::exists(tmp / "c.csv"));
}

TEST_CASE("report subcommand") {
    const auto r = result_of(run({"report", "--schema", fixture("binary3.schema.json"), "--target",
                                  fixture("constructed_target.csv"), "--source", fixture("constructed_source.csv")}));
    CHECK(r["sdcc_forward"]["ratio"] == "2/3");
    CHECK(r["sdcc_backward"]["ratio"] == "2/3");
    CHECK(r["not_covered_count"] == 1);
    CHECK(r["per_factor"][2]["missing_combinations_by_value"]["1"] == 2);
}

TEST_CASE("derive subcommand") {
    TempDir tmp;
    const auto fit = run({"derive", "--data", fixture("features.csv"), "--spec", fixture("derive.spec.json"),
                          "--artifact", tmp / "art.json", "--fit", "--out", tmp / "f.csv", "--schema-out",
                          tmp / "schema.json"});
    REQUIRE_MESSAGE(fit.code == 0, fit.err);
    const auto apply = run({"derive", "--data", fixture("features.csv"), "--spec", fixture("derive.spec.json"),
                            "--artifact", tmp / "art.json", "--out", tmp / "g.csv"});
    REQUIRE_MESSAGE(apply.code == 0, apply.err);
    CHECK(read_file(tmp / "f.csv") == read_file(tmp / "g.csv"));

    // derived outputs feed straight into the coverage commands
    const auto cov = result_of(run({"coverage", "--schema", tmp / "schema.json", "--data", tmp / "f.csv"}));
    CHECK(cov["universe_count"] == 468);

    const Json art = Json::parse(read_file(tmp / "art.json"));
    CHECK(art["format"] == "sdcc-derivation-artifact");
    CHECK(art.contains("provenance"));

    const auto missing = run({"derive", "--data", fixture("features.csv"), "--spec", fixture("derive.spec.json"),
                              "--artifact", tmp / "nope.json", "--out", tmp / "h.csv"});
    CHECK(missing.code == 5);
    CHECK_FALSE(fs::exists(tmp / "h.csv"));
}

TEST_CASE("exit codes and messages") {
    const auto schema = fixture("binary3.schema.json");
    CHECK(run({}).code == 2);
    CHECK(run({"bogus"}).code == 2);
    CHECK(run({"coverage", "--schema", schema}).code == 2);
    CHECK(run({"coverage", "--schema", schema, "--data", fixture("single.csv"), "-t", "0"}).code == 2);
    CHECK(run({"partition", "--schema", schema, "--target", fixture("single.csv"), "--source",
               fixture("single.csv"), "--mode", "loose", "--out", "x.csv"})
              .code == 2);

    const auto strength = run({"coverage", "--schema", schema, "--data", fixture("single.csv"), "-t", "4"});
    CHECK(strength.code == 3);
    CHECK(strength.err.find("error[strength]") != std::string::npos);

    const auto io = run({"coverage", "--schema", schema, "--data", fixture("absent.csv")});
    CHECK(io.code == 5);
    CHECK(io.err.find("absent.csv") != std::string::npos);

    // wrong schema for the data: label "5" is outside the binary domain
    const auto bad = run({"coverage", "--schema", schema, "--data", fixture("digits_source.csv")});
    CHECK(bad.code == 3);
    CHECK(bad.err.find("digits_source.csv") != std::string::npos);

    const auto help = run({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("partition") != std::string::npos);
    const auto version = run({"--version"});
    CHECK(version.code == 0);
    CHECK(version.out.find("0.1.0") != std::string::npos);
}

} // TEST_SUITE
