#pragma once

// Text formats: header-bearing CSV tables, schema documents (JSON) and file
// helpers shared by the CLI and the Python bindings.

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sdcc/coverage.hpp"

namespace sdcc {

using Json = nlohmann::ordered_json;

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers; // 1-based source line of each row

    /// Index of a header column; throws Validation when absent.
    std::size_t column(std::string_view name) const;
    bool has_column(std::string_view name) const;
};

/// RFC 4180 style: comma separated, optional double quotes, "" escapes a
/// quote. Blank lines are skipped. Ragged rows are an Ingestion error.
Table parse_csv(std::string_view text);

std::string csv_field(std::string_view field);
std::string format_csv(const Table& table);

/// {"factors": [{"name": ..., "values": [...]}, ...],
///  "constraints": [{"factor": "value", ...}, ...]}   (constraints optional)
/// Value labels must be JSON strings.
FactorSchema schema_from_json(const Json& document);
FactorSchema parse_schema(std::string_view text);
Json schema_to_json(const FactorSchema& schema);

/// Builds a dataset from a table with an `id` column and one column per
/// factor; extra columns are ignored. Labels match schema labels exactly.
Dataset dataset_from_table(const Table& table, SchemaPtr schema);

std::string read_file(const std::filesystem::path& path);
/// Writes through a temporary sibling and renames, so a failed run never
/// leaves a partial output behind.
void write_file(const std::filesystem::path& path, std::string_view content);

std::string sha256_hex(std::string_view bytes);

/// Shortest decimal that round-trips the double.
std::string format_double(double value);
/// Strict full-string decimal parse; throws Ingestion on junk or non-finite.
double parse_double(std::string_view text, std::string_view context);

} // namespace sdcc
