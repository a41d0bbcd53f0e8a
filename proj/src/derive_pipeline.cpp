#include "sdcc/derive_pipeline.hpp"

#include <algorithm>
#include <unordered_set>

namespace sdcc {

namespace {

Error spec_error(const std::string& message) {
    return Error(ErrorKind::Validation, "derivation spec: " + message);
}

Error artifact_error(const std::string& message) {
    return Error(ErrorKind::Validation, "derivation artifact: " + message);
}

FactorKind parse_kind(const std::string& text) {
    if (text == "categorical")
        return FactorKind::Categorical;
    if (text == "predicate")
        return FactorKind::Predicate;
    if (text == "quantile")
        return FactorKind::Quantile;
    if (text == "grid_region")
        return FactorKind::GridRegion;
    throw spec_error("unknown factor kind '" + text + "'");
}

std::vector<std::string> string_list(const Json& obj, const char* key, const std::string& rule) {
    if (!obj.contains(key) || !obj[key].is_array())
        throw spec_error("rule '" + rule + "' needs a '" + key + "' array");
    std::vector<std::string> out;
    for (const auto& v : obj[key]) {
        if (!v.is_string())
            throw spec_error("rule '" + rule + "': entries of '" + key + "' must be strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

std::string string_field(const Json& obj, const char* key, const std::string& rule) {
    if (!obj.contains(key) || !obj[key].is_string())
        throw spec_error("rule '" + rule + "' needs a string '" + key + "'");
    return obj[key].get<std::string>();
}

std::vector<double> numbers(const Json& value, const std::string& what) {
    if (!value.is_array())
        throw artifact_error(what + " must be an array");
    std::vector<double> out;
    for (const auto& v : value) {
        if (!v.is_number())
            throw artifact_error(what + " must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

std::vector<std::string> resolve_latent_columns(const FactorRule& rule, const Table& table) {
    if (!rule.columns.empty()) {
        for (const auto& c : rule.columns)
            (void)table.column(c);
        return rule.columns;
    }
    std::vector<std::string> out;
    for (const auto& h : table.header)
        if (h.starts_with(rule.column_prefix) && h != "id")
            out.push_back(h);
    if (out.empty())
        throw Error(ErrorKind::Validation, "no columns start with prefix '" + rule.column_prefix +
                                               "' for factor '" + rule.name + "'");
    return out;
}

std::vector<double> numeric_column(const Table& table, const std::string& column) {
    const std::size_t c = table.column(column);
    std::vector<double> out;
    out.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r)
        out.push_back(parse_double(table.rows[r][c], "line " + std::to_string(table.line_numbers[r]) +
                                                         ", column '" + column + "'"));
    return out;
}

Eigen::MatrixXd numeric_matrix(const Table& table, const std::vector<std::string>& columns) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(table.rows.size()),
                      static_cast<Eigen::Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) {
        const auto col = numeric_column(table, columns[j]);
        for (std::size_t i = 0; i < col.size(); ++i)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
    }
    return m;
}

std::vector<std::string> index_labels(std::size_t count) {
    std::vector<std::string> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(std::to_string(i));
    return out;
}

} // namespace

std::string_view to_string(FactorKind kind) noexcept {
    switch (kind) {
    case FactorKind::Categorical: return "categorical";
    case FactorKind::Predicate: return "predicate";
    case FactorKind::Quantile: return "quantile";
    case FactorKind::GridRegion: return "grid_region";
    }
    return "unknown";
}

DerivationSpec derivation_spec_from_json(const Json& document) {
    if (!document.is_object() || !document.contains("factors") || !document["factors"].is_array())
        throw spec_error("expected an object with a 'factors' array");
    DerivationSpec spec;
    std::unordered_set<std::string> names;
    for (const auto& r : document["factors"]) {
        if (!r.is_object() || !r.contains("name") || !r["name"].is_string() || !r.contains("kind") ||
            !r["kind"].is_string())
            throw spec_error("each rule needs string 'name' and 'kind'");
        FactorRule rule;
        rule.name = r["name"].get<std::string>();
        if (rule.name.empty() || rule.name == "id" || !names.insert(rule.name).second)
            throw spec_error("factor name '" + rule.name + "' is empty, reserved or repeated");
        rule.kind = parse_kind(r["kind"].get<std::string>());
        switch (rule.kind) {
        case FactorKind::Categorical:
            rule.column = string_field(r, "column", rule.name);
            rule.values = string_list(r, "values", rule.name);
            break;
        case FactorKind::Predicate:
            rule.column = string_field(r, "column", rule.name);
            rule.values = string_list(r, "values", rule.name);
            rule.true_values = string_list(r, "true_values", rule.name);
            break;
        case FactorKind::Quantile:
            rule.column = string_field(r, "column", rule.name);
            if (!r.contains("levels") || !r["levels"].is_array())
                throw spec_error("rule '" + rule.name + "' needs a 'levels' array");
            for (const auto& v : r["levels"]) {
                if (!v.is_number())
                    throw spec_error("rule '" + rule.name + "': levels must be numbers");
                rule.levels.push_back(v.get<double>());
            }
            break;
        case FactorKind::GridRegion:
            if (r.contains("columns"))
                rule.columns = string_list(r, "columns", rule.name);
            else
                rule.column_prefix = string_field(r, "column_prefix", rule.name);
            if (r.contains("cells_per_axis")) {
                if (!r["cells_per_axis"].is_number_unsigned())
                    throw spec_error("rule '" + rule.name + "': cells_per_axis must be a positive integer");
                rule.cells_per_axis = r["cells_per_axis"].get<std::size_t>();
            }
            if (rule.cells_per_axis < 2)
                throw spec_error("rule '" + rule.name + "': cells_per_axis must be at least 2");
            break;
        }
        spec.rules.push_back(std::move(rule));
    }
    if (spec.rules.empty())
        throw spec_error("no factor rules");
    return spec;
}

const FittedFactor& FittedArtifacts::find(const std::string& name) const {
    for (const auto& f : factors)
        if (f.name == name)
            return f;
    throw artifact_error("no fitted parameters for factor '" + name + "'");
}

FittedArtifacts fit_artifacts(const DerivationSpec& spec, const Table& reference) {
    FittedArtifacts out;
    for (const auto& rule : spec.rules) {
        if (rule.kind == FactorKind::Quantile) {
            FittedFactor f{rule.name, rule.kind, rule.column, {}, {}, std::nullopt, {}};
            f.binning = fit_quantile_bins(numeric_column(reference, rule.column), rule.levels);
            out.factors.push_back(std::move(f));
        } else if (rule.kind == FactorKind::GridRegion) {
            FittedFactor f{rule.name, rule.kind, {}, {}, {}, std::nullopt, {}};
            f.columns = resolve_latent_columns(rule, reference);
            f.projection = fit_projection(numeric_matrix(reference, f.columns));
            f.grid.cells_per_axis = rule.cells_per_axis;
            out.factors.push_back(std::move(f));
        }
    }
    return out;
}

Json artifacts_to_json(const FittedArtifacts& artifacts) {
    Json doc;
    doc["format"] = kArtifactFormat;
    doc["version"] = kArtifactVersion;
    Json factors = Json::array();
    for (const auto& f : artifacts.factors) {
        Json j;
        j["name"] = f.name;
        j["kind"] = std::string(to_string(f.kind));
        if (f.kind == FactorKind::Quantile) {
            j["column"] = f.column;
            j["levels"] = f.binning.levels;
            j["edges"] = f.binning.edges;
        } else {
            const Projection2D& p = *f.projection;
            j["columns"] = f.columns;
            j["cells_per_axis"] = f.grid.cells_per_axis;
            j["mean"] = std::vector<double>(p.mean.data(), p.mean.data() + p.mean.size());
            Json comps = Json::array();
            for (int c = 0; c < 2; ++c) {
                const Eigen::VectorXd col = p.components.col(c);
                comps.push_back(std::vector<double>(col.data(), col.data() + col.size()));
            }
            j["components"] = std::move(comps);
            j["explained_variance"] = p.explained_variance;
            j["axis_min"] = p.axis_min;
            j["axis_max"] = p.axis_max;
        }
        factors.push_back(std::move(j));
    }
    doc["factors"] = std::move(factors);
    return doc;
}

FittedArtifacts artifacts_from_json(const Json& document) {
    if (!document.is_object() || document.value("format", "") != kArtifactFormat)
        throw artifact_error("not a derivation artifact document");
    if (!document.contains("version") || document["version"] != kArtifactVersion)
        throw artifact_error("unsupported version");
    if (!document.contains("factors") || !document["factors"].is_array())
        throw artifact_error("missing 'factors'");

    FittedArtifacts out;
    try {
        for (const auto& j : document["factors"]) {
            FittedFactor f;
            f.name = j.at("name").get<std::string>();
            f.kind = parse_kind(j.at("kind").get<std::string>());
            if (f.kind == FactorKind::Quantile) {
                f.column = j.at("column").get<std::string>();
                f.binning.levels = numbers(j.at("levels"), "levels");
                f.binning.edges = numbers(j.at("edges"), "edges");
                if (f.binning.edges.size() != f.binning.levels.size() || f.binning.edges.empty() ||
                    !std::is_sorted(f.binning.edges.begin(), f.binning.edges.end()))
                    throw artifact_error("factor '" + f.name + "' has inconsistent bin edges");
            } else if (f.kind == FactorKind::GridRegion) {
                f.columns = j.at("columns").get<std::vector<std::string>>();
                f.grid.cells_per_axis = j.at("cells_per_axis").get<std::size_t>();
                const auto mean = numbers(j.at("mean"), "mean");
                const auto& comps = j.at("components");
                if (!comps.is_array() || comps.size() != 2)
                    throw artifact_error("factor '" + f.name + "' needs two components");
                const auto d = static_cast<Eigen::Index>(mean.size());
                if (mean.size() != f.columns.size() || d < 2)
                    throw artifact_error("factor '" + f.name + "' has inconsistent dimensions");
                Projection2D p;
                p.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), d);
                p.components.resize(d, 2);
                for (int c = 0; c < 2; ++c) {
                    const auto comp = numbers(comps[static_cast<std::size_t>(c)], "components");
                    if (static_cast<Eigen::Index>(comp.size()) != d)
                        throw artifact_error("factor '" + f.name + "' has inconsistent dimensions");
                    p.components.col(c) = Eigen::Map<const Eigen::VectorXd>(comp.data(), d);
                }
                const auto ev = numbers(j.at("explained_variance"), "explained_variance");
                const auto lo = numbers(j.at("axis_min"), "axis_min");
                const auto hi = numbers(j.at("axis_max"), "axis_max");
                if (ev.size() != 2 || lo.size() != 2 || hi.size() != 2)
                    throw artifact_error("factor '" + f.name + "' needs two-axis ranges");
                for (std::size_t a = 0; a < 2; ++a) {
                    p.explained_variance[a] = ev[a];
                    p.axis_min[a] = lo[a];
                    p.axis_max[a] = hi[a];
                }
                f.projection = std::move(p);
            } else {
                throw artifact_error("factor '" + f.name + "' kind has no fitted parameters");
            }
            out.factors.push_back(std::move(f));
        }
    } catch (const nlohmann::json::exception& e) {
        throw artifact_error(e.what());
    }
    return out;
}

FactorSchema derived_schema(const DerivationSpec& spec, const FittedArtifacts& artifacts) {
    std::vector<Factor> factors;
    for (const auto& rule : spec.rules) {
        switch (rule.kind) {
        case FactorKind::Categorical:
            factors.push_back({rule.name, rule.values});
            break;
        case FactorKind::Predicate:
            factors.push_back({rule.name, {"False", "True"}});
            break;
        case FactorKind::Quantile:
            factors.push_back({rule.name, index_labels(artifacts.find(rule.name).binning.bin_count())});
            break;
        case FactorKind::GridRegion:
            factors.push_back({rule.name, index_labels(artifacts.find(rule.name).grid.region_count())});
            break;
        }
    }
    return FactorSchema(std::move(factors));
}

Table derive_factors(const DerivationSpec& spec, const FittedArtifacts& artifacts,
                     const Table& features) {
    const std::size_t id_col = features.column("id");
    const std::size_t n = features.rows.size();

    Table out;
    out.header.push_back("id");
    std::vector<std::vector<std::string>> columns;
    for (const auto& rule : spec.rules) {
        out.header.push_back(rule.name);
        std::vector<std::string> labels;
        labels.reserve(n);
        switch (rule.kind) {
        case FactorKind::Categorical: {
            const std::size_t c = features.column(rule.column);
            const std::unordered_set<std::string> domain(rule.values.begin(), rule.values.end());
            for (std::size_t r = 0; r < n; ++r) {
                const auto& v = features.rows[r][c];
                if (!domain.contains(v))
                    throw Error(ErrorKind::Validation,
                                "line " + std::to_string(features.line_numbers[r]) + ": unknown " +
                                    rule.column + " label '" + v + "' for factor '" + rule.name + "'");
                labels.push_back(v);
            }
            break;
        }
        case FactorKind::Predicate: {
            const std::size_t c = features.column(rule.column);
            std::vector<std::string> source;
            source.reserve(n);
            for (const auto& row : features.rows)
                source.push_back(row[c]);
            const PredicateFactor pred{rule.name, rule.column, rule.values,
                                       {rule.true_values.begin(), rule.true_values.end()}};
            for (bool b : apply_predicate(source, pred))
                labels.push_back(b ? "True" : "False");
            break;
        }
        case FactorKind::Quantile: {
            const FittedFactor& fitted = artifacts.find(rule.name);
            if (fitted.kind != rule.kind || fitted.column != rule.column || fitted.binning.levels != rule.levels)
                throw artifact_error("factor '" + rule.name + "' does not match the derivation spec");
            for (double x : numeric_column(features, rule.column))
                labels.push_back(std::to_string(assign_bin(x, fitted.binning)));
            break;
        }
        case FactorKind::GridRegion: {
            const FittedFactor& fitted = artifacts.find(rule.name);
            const bool columns_match =
                rule.columns.empty()
                    ? std::all_of(fitted.columns.begin(), fitted.columns.end(),
                                  [&](const std::string& c) { return c.starts_with(rule.column_prefix); })
                    : fitted.columns == rule.columns;
            if (fitted.kind != rule.kind || !columns_match ||
                fitted.grid.cells_per_axis != rule.cells_per_axis)
                throw artifact_error("factor '" + rule.name + "' does not match the derivation spec");
            const auto points = project_and_scale(numeric_matrix(features, fitted.columns), *fitted.projection);
            for (const auto& p : points)
                labels.push_back(std::to_string(region_of(p, fitted.grid)));
            break;
        }
        }
        columns.push_back(std::move(labels));
    }

    out.rows.resize(n);
    out.line_numbers.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
        out.rows[r].reserve(columns.size() + 1);
        out.rows[r].push_back(features.rows[r][id_col]);
        for (const auto& col : columns)
            out.rows[r].push_back(col[r]);
        out.line_numbers[r] = r + 2;
    }
    return out;
}

} // namespace sdcc
