#include "sdcc/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <openssl/evp.h>

namespace sdcc {

namespace {

[[noreturn]] void ingestion_error(std::size_t line, const std::string& message) {
    throw Error(ErrorKind::Ingestion, "line " + std::to_string(line) + ": " + message);
}

} // namespace

std::size_t Table::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name)
            return i;
    throw Error(ErrorKind::Validation, "missing column '" + std::string(name) + "'");
}

bool Table::has_column(std::string_view name) const {
    return std::find(header.begin(), header.end(), name) != header.end();
}

Table parse_csv(std::string_view text) {
    Table table;
    std::vector<std::string> row;
    std::string field;
    std::size_t line = 1;
    std::size_t row_line = 1;
    bool in_quotes = false;
    bool field_quoted = false;
    bool row_has_content = false;

    const auto end_row = [&] {
        if (!row_has_content && row.empty() && field.empty() && !field_quoted)
            return; // blank line
        row.push_back(std::move(field));
        field.clear();
        field_quoted = false;
        if (table.header.empty()) {
            table.header = std::move(row);
            std::unordered_set<std::string> seen;
            for (const auto& h : table.header)
                if (!seen.insert(h).second)
                    ingestion_error(row_line, "duplicate column '" + h + "'");
        } else {
            if (row.size() != table.header.size())
                ingestion_error(row_line, "expected " + std::to_string(table.header.size()) +
                                              " fields, found " + std::to_string(row.size()));
            table.rows.push_back(std::move(row));
            table.line_numbers.push_back(row_line);
        }
        row.clear();
        row_has_content = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n')
                    ++line;
                field += c;
            }
            continue;
        }
        switch (c) {
        case '"':
            if (!field.empty())
                ingestion_error(line, "quote inside unquoted field");
            in_quotes = true;
            field_quoted = true;
            row_has_content = true;
            break;
        case ',':
            row.push_back(std::move(field));
            field.clear();
            field_quoted = false;
            row_has_content = true;
            break;
        case '\r':
            if (i + 1 < text.size() && text[i + 1] == '\n')
                break;
            ingestion_error(line, "bare carriage return");
        case '\n':
            end_row();
            ++line;
            row_line = line;
            break;
        default:
            if (field_quoted)
                ingestion_error(line, "characters after closing quote");
            field += c;
            row_has_content = true;
        }
    }
    if (in_quotes)
        ingestion_error(line, "unterminated quoted field");
    end_row();
    if (table.header.empty())
        throw Error(ErrorKind::Ingestion, "empty table: header row is required");
    return table;
}

std::string csv_field(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos)
        return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

std::string format_csv(const Table& table) {
    std::string out;
    const auto emit = [&out](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0)
                out += ',';
            out += csv_field(row[i]);
        }
        out += '\n';
    };
    emit(table.header);
    for (const auto& row : table.rows)
        emit(row);
    return out;
}

FactorSchema schema_from_json(const Json& document) {
    const auto bad = [](const std::string& message) -> Error {
        return Error(ErrorKind::Validation, "schema: " + message);
    };
    if (!document.is_object() || !document.contains("factors") || !document["factors"].is_array())
        throw bad("expected an object with a 'factors' array");

    std::vector<Factor> factors;
    for (const auto& f : document["factors"]) {
        if (!f.is_object() || !f.contains("name") || !f["name"].is_string() ||
            !f.contains("values") || !f["values"].is_array())
            throw bad("each factor needs a string 'name' and a 'values' array");
        Factor factor{f["name"].get<std::string>(), {}};
        for (const auto& v : f["values"]) {
            if (!v.is_string())
                throw bad("value labels of factor '" + factor.name + "' must be strings");
            factor.values.push_back(v.get<std::string>());
        }
        factors.push_back(std::move(factor));
    }

    std::vector<ValueCombination> constraints;
    if (document.contains("constraints")) {
        if (!document["constraints"].is_array())
            throw bad("'constraints' must be an array");
        // Resolve names against a constraint-free schema first.
        const FactorSchema plain(factors);
        for (const auto& c : document["constraints"]) {
            if (!c.is_object() || c.empty())
                throw bad("each constraint must be a non-empty {factor: value} object");
            std::vector<Assignment> pairs;
            for (const auto& [name, value] : c.items()) {
                const auto f = plain.find_factor(name);
                if (!f)
                    throw bad("constraint references unknown factor '" + name + "'");
                if (!value.is_string())
                    throw bad("constraint value for '" + name + "' must be a string");
                const auto v = plain.find_value(*f, value.get<std::string>());
                if (!v)
                    throw bad("constraint references unknown value '" + value.get<std::string>() +
                              "' of factor '" + name + "'");
                pairs.push_back({*f, *v});
            }
            constraints.emplace_back(std::move(pairs));
        }
    }
    return FactorSchema(std::move(factors), std::move(constraints));
}

FactorSchema parse_schema(std::string_view text) {
    Json document;
    try {
        document = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::Ingestion, std::string("schema: ") + e.what());
    }
    return schema_from_json(document);
}

Json schema_to_json(const FactorSchema& schema) {
    Json doc;
    Json factors = Json::array();
    for (const auto& f : schema.factors())
        factors.push_back(Json{{"name", f.name}, {"values", f.values}});
    doc["factors"] = std::move(factors);
    if (!schema.constraints().empty()) {
        Json constraints = Json::array();
        for (const auto& c : schema.constraints()) {
            Json obj = Json::object();
            for (const auto& p : c.pairs())
                obj[schema.factor(p.factor).name] = schema.factor(p.factor).values[p.value];
            constraints.push_back(std::move(obj));
        }
        doc["constraints"] = std::move(constraints);
    }
    return doc;
}

Dataset dataset_from_table(const Table& table, SchemaPtr schema) {
    const std::size_t id_col = table.column("id");
    std::vector<std::size_t> cols;
    for (const auto& f : schema->factors())
        cols.push_back(table.column(f.name));

    std::vector<Record> records;
    records.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::size_t line = table.line_numbers[r];
        Record rec{row[id_col], {}};
        if (rec.id.empty())
            ingestion_error(line, "empty id");
        rec.values.reserve(cols.size());
        for (std::size_t f = 0; f < cols.size(); ++f) {
            const std::string& label = row[cols[f]];
            const auto& factor = schema->factor(f);
            if (label.empty())
                ingestion_error(line, "missing value for factor '" + factor.name + "'");
            const auto v = schema->find_value(f, label);
            if (!v)
                ingestion_error(line, "unknown value '" + label + "' for factor '" + factor.name + "'");
            rec.values.push_back(*v);
        }
        records.push_back(std::move(rec));
    }
    try {
        return Dataset(std::move(schema), std::move(records));
    } catch (const Error& e) {
        throw Error(e.kind(), std::string("dataset: ") + e.what());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out)
            throw Error(ErrorKind::Io, "failed writing '" + path.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw Error(ErrorKind::Io, "cannot move output into '" + path.string() + "': " + ec.message());
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1)
        throw Error(ErrorKind::Io, "SHA-256 digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * length);
    for (unsigned int i = 0; i < length; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

double parse_double(std::string_view text, std::string_view context) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && *first == '+')
        ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (text.empty() || ec != std::errc() || ptr != last)
        throw Error(ErrorKind::Ingestion, std::string(context) + ": '" + std::string(text) +
                                              "' is not a number");
    if (!std::isfinite(value))
        throw Error(ErrorKind::Ingestion, std::string(context) + ": non-finite value '" +
                                              std::string(text) + "'");
    return value;
}

} // namespace sdcc
