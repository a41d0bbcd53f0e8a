#include "sdcc/set_construction.hpp"

#include <algorithm>
#include <set>

#include "sdcc/sampling.hpp"

namespace sdcc {

std::string_view to_string(CoverageMode mode) noexcept {
    return mode == CoverageMode::Strict ? "strict" : "relaxed";
}

CoverageMode parse_coverage_mode(std::string_view text) {
    if (text == "strict")
        return CoverageMode::Strict;
    if (text == "relaxed")
        return CoverageMode::Relaxed;
    throw Error(ErrorKind::Validation, "unknown coverage mode '" + std::string(text) +
                                           "' (expected strict or relaxed)");
}

bool PartitionResult::is_covered(const std::string& id) const {
    return std::binary_search(covered.begin(), covered.end(), id);
}

PartitionResult partition_strict(const Dataset& target, const Dataset& source, Strength t) {
    const SDCCReport report = set_difference_coverage(target, source, t);
    PartitionResult out;
    out.mode = CoverageMode::Strict;
    out.missing_counts = report.per_record_missing;
    // map iteration is already id-sorted
    for (const auto& [id, covered] : report.per_record_flags)
        (covered ? out.covered : out.not_covered).push_back(id);
    return out;
}

PartitionResult partition_relaxed(const Dataset& target, const Dataset& source, Strength t,
                                  std::string_view region_factor) {
    const FactorSchema& schema = target.schema();
    const auto factor = schema.find_factor(region_factor);
    if (!factor)
        throw Error(ErrorKind::Validation,
                    "region factor '" + std::string(region_factor) + "' is not in the schema");

    PartitionResult strict = partition_strict(target, source, t);

    std::set<ValueIndex> implicated;
    std::map<std::string, ValueIndex> region_index;
    for (const auto& r : target.records()) {
        const ValueIndex region = r.values[*factor];
        region_index.emplace(r.id, region);
        if (strict.missing_counts.at(r.id) > 0)
            implicated.insert(region);
    }

    PartitionResult out;
    out.mode = CoverageMode::Relaxed;
    out.region_factor = std::string(region_factor);
    out.missing_counts = std::move(strict.missing_counts);
    const auto& labels = schema.factor(*factor).values;
    for (ValueIndex v : implicated)
        out.implicated_regions.push_back(labels[v]);
    for (const auto& [id, region] : region_index) {
        out.regions.emplace(id, labels[region]);
        (implicated.contains(region) ? out.not_covered : out.covered).push_back(id);
    }
    return out;
}

GapReport coverage_gap_report(const Dataset& target, const Dataset& source, Strength t) {
    const SDCCReport forward = set_difference_coverage(target, source, t);
    const SDCCReport backward = set_difference_coverage(source, target, t);
    const FactorSchema& schema = target.schema();

    GapReport out;
    out.t = t;
    out.sdcc_forward = forward.sdcc;
    out.sdcc_backward = backward.sdcc;
    for (const auto& [id, covered] : forward.per_record_flags)
        ++(covered ? out.covered_count : out.not_covered_count);

    std::vector<std::vector<std::size_t>> counts(schema.factor_count());
    for (std::size_t f = 0; f < schema.factor_count(); ++f)
        counts[f].assign(schema.domain_size(f), 0);
    for (const auto& combination : forward.missing_combinations)
        for (const auto& p : combination.pairs())
            ++counts[p.factor][p.value];

    for (std::size_t f = 0; f < schema.factor_count(); ++f) {
        FactorGap gap{schema.factor(f).name, {}};
        for (std::size_t v = 0; v < counts[f].size(); ++v)
            gap.values.push_back({schema.factor(f).values[v], counts[f][v]});
        out.per_factor.push_back(std::move(gap));
    }
    return out;
}

std::vector<std::string> SelectionPlan::batch() const {
    std::vector<std::string> out = not_covered_ids;
    out.insert(out.end(), random_ids.begin(), random_ids.end());
    return out;
}

SelectionPlan select_labeling_batch(const Dataset& pool, const Dataset& source,
                                    const SelectionRequest& request) {
    if (request.mode == CoverageMode::Relaxed && !request.region_factor)
        throw Error(ErrorKind::Validation, "relaxed selection requires a region factor");
    if (request.n_random + request.n_not_covered > pool.size())
        throw Error(ErrorKind::Selection,
                    "requested " + std::to_string(request.n_random) + " random + " +
                        std::to_string(request.n_not_covered) + " not-covered records from a pool of " +
                        std::to_string(pool.size()) + "; achievable total is " +
                        std::to_string(pool.size()));
    if (pool.empty())
        throw Error(ErrorKind::Selection, "labeling pool is empty");

    const PartitionResult partition =
        request.mode == CoverageMode::Strict
            ? partition_strict(pool, source, request.t)
            : partition_relaxed(pool, source, request.t, *request.region_factor);

    SelectionPlan plan;
    plan.seed = request.seed;
    plan.mode = request.mode;
    plan.requested_random = request.n_random;
    plan.requested_not_covered = request.n_not_covered;
    plan.stratum_size = partition.not_covered.size();

    // Partition id lists are sorted, which fixes the sampling order.
    std::vector<std::string> stratum = partition.not_covered;
    SeededSampler sampler(request.seed);
    plan.not_covered_ids = sampler.draw(stratum, request.n_not_covered);
    plan.not_covered_shortfall = request.n_not_covered - plan.not_covered_ids.size();

    std::vector<std::string> remainder = partition.covered;
    remainder.insert(remainder.end(), stratum.begin(), stratum.end());
    std::sort(remainder.begin(), remainder.end());
    plan.random_ids = sampler.draw(remainder, request.n_random);
    return plan;
}

} // namespace sdcc
