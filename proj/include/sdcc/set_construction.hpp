#pragma once

// Coverage-driven workflows: covered/not-covered partitioning of a target
// against a source, two-way coverage gap diagnostics and labeling-batch
// selection.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdcc/coverage.hpp"

namespace sdcc {

enum class CoverageMode { Strict, Relaxed };

std::string_view to_string(CoverageMode mode) noexcept;
CoverageMode parse_coverage_mode(std::string_view text);

struct PartitionResult {
    CoverageMode mode = CoverageMode::Strict;
    std::vector<std::string> covered;     // sorted ids
    std::vector<std::string> not_covered; // sorted ids
    /// Combinations of each record absent from the source.
    std::map<std::string, std::size_t> missing_counts;
    /// Relaxed mode only.
    std::optional<std::string> region_factor;
    std::map<std::string, std::string> regions;      // id -> region label
    std::vector<std::string> implicated_regions;     // in schema value order

    bool is_covered(const std::string& id) const;
};

/// A record is not covered when at least one of its t-way combinations is
/// missing from the source.
PartitionResult partition_strict(const Dataset& target, const Dataset& source, Strength t);

/// Every target record whose region value owns a strictly not-covered record
/// is not covered.
PartitionResult partition_relaxed(const Dataset& target, const Dataset& source, Strength t,
                                  std::string_view region_factor);

struct ValueGap {
    std::string value;
    std::size_t missing_combinations = 0; // forward-direction combinations using this value
};

struct FactorGap {
    std::string factor;
    std::vector<ValueGap> values; // schema value order
};

struct GapReport {
    Strength t = kDefaultStrength;
    Ratio sdcc_forward;  // SDCC(target, source)
    Ratio sdcc_backward; // SDCC(source, target)
    std::size_t covered_count = 0;
    std::size_t not_covered_count = 0;
    std::vector<FactorGap> per_factor;
};

/// Target and source must both be non-empty.
GapReport coverage_gap_report(const Dataset& target, const Dataset& source, Strength t);

struct SelectionRequest {
    Strength t = kDefaultStrength;
    std::size_t n_random = 0;
    std::size_t n_not_covered = 0;
    CoverageMode mode = CoverageMode::Strict;
    std::optional<std::string> region_factor;
    std::uint64_t seed = 0;
};

struct SelectionPlan {
    std::uint64_t seed = 0;
    CoverageMode mode = CoverageMode::Strict;
    std::size_t requested_random = 0;
    std::size_t requested_not_covered = 0;
    std::size_t stratum_size = 0;        // not-covered records in the pool
    std::size_t not_covered_shortfall = 0;
    std::vector<std::string> not_covered_ids; // draw order
    std::vector<std::string> random_ids;      // draw order

    /// not_covered_ids followed by random_ids.
    std::vector<std::string> batch() const;
};

/// The not-covered quota is drawn first from the pool's not-covered stratum,
/// then the random sample from everything not yet drawn. Ids are sorted
/// before sampling so ingestion order does not matter.
SelectionPlan select_labeling_batch(const Dataset& pool, const Dataset& source,
                                    const SelectionRequest& request);

} // namespace sdcc
