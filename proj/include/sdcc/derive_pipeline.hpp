#pragma once

// Table-level factor derivation: a derivation spec names source columns and
// factor kinds; fitted parameters (bin edges, projection, axis ranges) are
// learned once on a reference table and persisted as a versioned document.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sdcc/derivation.hpp"
#include "sdcc/io.hpp"

namespace sdcc {

inline constexpr const char* kArtifactFormat = "sdcc-derivation-artifact";
inline constexpr int kArtifactVersion = 1;

enum class FactorKind { Categorical, Predicate, Quantile, GridRegion };

std::string_view to_string(FactorKind kind) noexcept;

struct FactorRule {
    std::string name;
    FactorKind kind = FactorKind::Categorical;
    std::string column;                  // categorical, predicate, quantile
    std::vector<std::string> values;     // categorical domain; predicate source domain
    std::vector<std::string> true_values;  // predicate
    std::vector<double> levels;            // quantile
    std::vector<std::string> columns;      // grid_region: explicit latent columns
    std::string column_prefix;             // grid_region: alternative to `columns`
    std::size_t cells_per_axis = 5;        // grid_region
};

/// {"factors": [
///   {"name": "digit",   "kind": "categorical", "column": "label", "values": [...]},
///   {"name": "circle",  "kind": "predicate",   "column": "label", "values": [...],
///    "true_values": ["0", "6", "8", "9"]},
///   {"name": "density", "kind": "quantile",    "column": "mean_pixel",
///    "levels": [0.25, 0.5, 0.75]},
///   {"name": "region",  "kind": "grid_region", "column_prefix": "z", "cells_per_axis": 5}]}
struct DerivationSpec {
    std::vector<FactorRule> rules;
};

DerivationSpec derivation_spec_from_json(const Json& document);

struct FittedFactor {
    std::string name;
    FactorKind kind = FactorKind::Quantile;
    std::string column;
    QuantileBinning binning;                 // quantile
    std::vector<std::string> columns;        // grid_region, resolved
    std::optional<Projection2D> projection;  // grid_region
    GridPartition grid;                      // grid_region
};

/// Parameters fitted on a reference table, one entry per quantile or
/// grid_region rule in spec order.
struct FittedArtifacts {
    std::vector<FittedFactor> factors;

    const FittedFactor& find(const std::string& name) const;
};

FittedArtifacts fit_artifacts(const DerivationSpec& spec, const Table& reference);

Json artifacts_to_json(const FittedArtifacts& artifacts);
FittedArtifacts artifacts_from_json(const Json& document);

/// Schema of the derived factor table: categorical keeps its domain,
/// predicates are {False, True}, quantile bins are "0".."m" and regions are
/// "0".."n*n-1".
FactorSchema derived_schema(const DerivationSpec& spec, const FittedArtifacts& artifacts);

/// Factor table with an `id` column followed by one column per rule.
Table derive_factors(const DerivationSpec& spec, const FittedArtifacts& artifacts,
                     const Table& features);

} // namespace sdcc
