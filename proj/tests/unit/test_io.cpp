#include <doctest.h>

#include <filesystem>
#include <random>

#include "sdcc/io.hpp"

using namespace sdcc;

namespace {

std::string error_message(auto&& fn, ErrorKind expected) {
    try {
        fn();
    } catch (const Error& e) {
        CHECK(e.kind() == expected);
        return e.what();
    }
    FAIL("expected an error");
    return {};
}

const char* kBinarySchema = R"({"factors": [
  {"name": "a", "values": ["0", "1"]},
  {"name": "b", "values": ["0", "1"]},
  {"name": "c", "values": ["0", "1"]}]})";

} // namespace

TEST_SUITE("io") {

TEST_CASE("parse_csv: quoting, blank lines and CRLF") {
    const auto t = parse_csv("id,name\r\n\r\n1,\"a, b\"\n2,\"say \"\"hi\"\"\"\n\n3,\"two\nlines\"\n4,\n");
    CHECK(t.header == std::vector<std::string>{"id", "name"});
    REQUIRE(t.rows.size() == 4);
    CHECK(t.rows[0][1] == "a, b");
    CHECK(t.rows[1][1] == "say \"hi\"");
    CHECK(t.rows[2][1] == "two\nlines");
    CHECK(t.rows[3][1].empty());
    CHECK(t.line_numbers == std::vector<std::size_t>{3, 4, 6, 8});
    CHECK(t.column("name") == 1);
    CHECK_FALSE(t.has_column("x"));
    CHECK_THROWS_AS(t.column("x"), Error);

    const auto no_newline = parse_csv("id\nr0");
    CHECK(no_newline.rows.size() == 1);
}

TEST_CASE("parse_csv: errors carry line numbers") {
    CHECK(error_message([] { parse_csv("id,a\nr0,1\nr1\n"); }, ErrorKind::Ingestion).find("line 3") !=
          std::string::npos);
    CHECK(error_message([] { parse_csv("id,a\nr0,\"open\n"); }, ErrorKind::Ingestion).find("unterminated") !=
          std::string::npos);
    CHECK(error_message([] { parse_csv("id,id\n"); }, ErrorKind::Ingestion).find("duplicate") !=
          std::string::npos);
    CHECK(error_message([] { parse_csv("id,a\nr0,x\"y\n"); }, ErrorKind::Ingestion).find("line 2") !=
          std::string::npos);
    error_message([] { parse_csv("id,a\nr0,\"x\"y\n"); }, ErrorKind::Ingestion);
    error_message([] { parse_csv(""); }, ErrorKind::Ingestion);
    error_message([] { parse_csv("\n\n"); }, ErrorKind::Ingestion);
}

TEST_CASE("property: format_csv and parse_csv round-trip") {
    std::mt19937_64 rng(17);
    const std::string alphabet = "ab,\"\n 1";
    for (int trial = 0; trial < 200; ++trial) {
        Table t;
        const std::size_t cols = 1 + rng() % 4;
        for (std::size_t c = 0; c < cols; ++c)
            t.header.push_back("h" + std::to_string(c));
        const std::size_t rows = rng() % 6;
        for (std::size_t r = 0; r < rows; ++r) {
            std::vector<std::string> row;
            for (std::size_t c = 0; c < cols; ++c) {
                std::string f;
                const std::size_t len = 1 + rng() % 5; // non-empty keeps single-column rows non-blank
                for (std::size_t i = 0; i < len; ++i)
                    f += alphabet[rng() % alphabet.size()];
                row.push_back(f);
            }
            t.rows.push_back(row);
        }
        const Table back = parse_csv(format_csv(t));
        REQUIRE(back.header == t.header);
        REQUIRE(back.rows == t.rows);
    }
}

TEST_CASE("schema documents") {
    const FactorSchema s = parse_schema(kBinarySchema);
    CHECK(s.factor_count() == 3);
    CHECK(s.factor(2).name == "c");
    CHECK(parse_schema(schema_to_json(s).dump()) == s);

    const FactorSchema constrained = parse_schema(R"({"factors": [
        {"name": "digit", "values": ["1", "8"]}, {"name": "circle", "values": ["False", "True"]}],
        "constraints": [{"digit": "1", "circle": "True"}, {"digit": "8", "circle": "False"}],
        "provenance": {"ignored": true}})");
    CHECK(constrained.constraints().size() == 2);
    CHECK(parse_schema(schema_to_json(constrained).dump()) == constrained);

    error_message([] { parse_schema("{"); }, ErrorKind::Ingestion);
    error_message([] { parse_schema(R"({"factors": [{"name": "a", "values": [0, 1]}]})"); },
                  ErrorKind::Validation);
    error_message([] { parse_schema(R"({"factors": [{"name": "a", "values": ["0", "0"]}]})"); },
                  ErrorKind::Validation);
    error_message([] { parse_schema(R"({"factors": []})"); }, ErrorKind::Validation);
    error_message([] { parse_schema(R"({"factors": [{"name": "a", "values": []}]})"); }, ErrorKind::Validation);
    error_message(
        [] {
            parse_schema(R"({"factors": [{"name": "a", "values": ["0"]}], "constraints": [{"a": "9"}]})");
        },
        ErrorKind::Validation);
}

TEST_CASE("dataset_from_table") {
    const auto schema = std::make_shared<const FactorSchema>(parse_schema(kBinarySchema));
    const auto d = dataset_from_table(parse_csv("c,id,extra,b,a\n1,r0,zz,1,0\n0,r1,,0,1\n"), schema);
    REQUIRE(d.size() == 2);
    CHECK(d.records()[0].id == "r0");
    CHECK(d.records()[0].values == std::vector<ValueIndex>{0, 1, 1});
    CHECK(d.records()[1].values == std::vector<ValueIndex>{1, 0, 0});

    // labels are exact strings: no trimming, no numeric coercion
    CHECK(error_message([&] { dataset_from_table(parse_csv("id,a,b,c\nr0,0,1, 1\n"), schema); },
                        ErrorKind::Ingestion)
              .find("line 2") != std::string::npos);
    CHECK(error_message([&] { dataset_from_table(parse_csv("id,a,b,c\nr0,0,1,1\nr1,0,1.0,1\n"), schema); },
                        ErrorKind::Ingestion)
              .find("line 3") != std::string::npos);
    CHECK(error_message([&] { dataset_from_table(parse_csv("id,a,b\nr0,0,1\n"), schema); },
                        ErrorKind::Validation)
              .find("'c'") != std::string::npos);
    error_message([&] { dataset_from_table(parse_csv("a,b,c\n0,1,1\n"), schema); }, ErrorKind::Validation);
    error_message([&] { dataset_from_table(parse_csv("id,a,b,c\n,0,1,1\n"), schema); }, ErrorKind::Ingestion);
    error_message([&] { dataset_from_table(parse_csv("id,a,b,c\nr0,0,1,1\nr0,1,1,1\n"), schema); },
                  ErrorKind::Validation);
}

TEST_CASE("numbers") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(2.75) == "2.75");
    CHECK(parse_double(format_double(1.0 / 3.0), "x") == 1.0 / 3.0);
    CHECK(parse_double("-1e-3", "x") == -0.001);
    error_message([] { parse_double("1.5x", "x"); }, ErrorKind::Ingestion);
    error_message([] { parse_double("", "x"); }, ErrorKind::Ingestion);
    error_message([] { parse_double("nan", "x"); }, ErrorKind::Ingestion);
    error_message([] { parse_double("inf", "x"); }, ErrorKind::Ingestion);
}

TEST_CASE("files and digests") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");

    const auto dir = std::filesystem::temp_directory_path() / "sdcc_io_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "out.txt";
    write_file(path, "first");
    write_file(path, "second\n");
    CHECK(read_file(path) == "second\n");
    CHECK_FALSE(std::filesystem::exists(dir / "out.txt.tmp"));
    error_message([&] { read_file(dir / "missing.txt"); }, ErrorKind::Io);
    error_message([&] { write_file(dir / "no" / "such" / "dir.txt", "x"); }, ErrorKind::Io);
    std::filesystem::remove_all(dir);
}

} // TEST_SUITE
