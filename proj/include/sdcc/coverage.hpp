#pragma once

// t-way value combinations, combinatorial coverage (CC) and set-difference
// combinatorial coverage (SDCC) over discrete-factor datasets.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sdcc/error.hpp"

namespace sdcc {

using Strength = std::size_t;
using ValueIndex = std::uint32_t;

/// Default interaction strength.
inline constexpr Strength kDefaultStrength = 2;

struct Factor {
    std::string name;
    std::vector<std::string> values;

    bool operator==(const Factor&) const = default;
};

/// One (factor, value) pair, both as indices into the schema.
struct Assignment {
    std::size_t factor = 0;
    ValueIndex value = 0;

    auto operator<=>(const Assignment&) const = default;
};

/// A t-tuple of (factor, value) pairs with strictly increasing factor indices.
class ValueCombination {
public:
    ValueCombination() = default;
    /// Sorts by factor; throws Validation on an empty list or a repeated factor.
    explicit ValueCombination(std::vector<Assignment> pairs);

    std::size_t strength() const noexcept { return pairs_.size(); }
    std::span<const Assignment> pairs() const noexcept { return pairs_; }

    /// True when every pair of `other` also appears here.
    bool contains(const ValueCombination& other) const noexcept;

    auto operator<=>(const ValueCombination&) const = default;

private:
    std::vector<Assignment> pairs_;
};

class FactorSchema {
public:
    /// Validates names, domains and constraints; throws Validation.
    explicit FactorSchema(std::vector<Factor> factors,
                          std::vector<ValueCombination> constraints = {});

    std::size_t factor_count() const noexcept { return factors_.size(); }
    std::span<const Factor> factors() const noexcept { return factors_; }
    const Factor& factor(std::size_t index) const { return factors_.at(index); }
    std::size_t domain_size(std::size_t index) const { return factors_.at(index).values.size(); }

    /// Forbidden value combinations of any arity.
    std::span<const ValueCombination> constraints() const noexcept { return constraints_; }

    std::optional<std::size_t> find_factor(std::string_view name) const;
    std::optional<ValueIndex> find_value(std::size_t factor, std::string_view label) const;

    /// Throws Strength unless 1 <= t <= k.
    void check_strength(Strength t) const;

    /// Human-readable form such as `{digit=3, region=7}`.
    std::string describe(const ValueCombination& combination) const;

    bool operator==(const FactorSchema&) const = default;

private:
    std::vector<Factor> factors_;
    std::vector<ValueCombination> constraints_;
};

using SchemaPtr = std::shared_ptr<const FactorSchema>;

struct Record {
    std::string id;
    std::vector<ValueIndex> values; // aligned to schema factor order
};

/// Records that all validate against one schema, with unique ids.
class Dataset {
public:
    Dataset(SchemaPtr schema, std::vector<Record> records);

    const FactorSchema& schema() const noexcept { return *schema_; }
    const SchemaPtr& schema_ptr() const noexcept { return schema_; }
    std::span<const Record> records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }

    /// Throws Validation when the datasets are not over the same schema.
    void check_same_schema(const Dataset& other) const;

private:
    SchemaPtr schema_;
    std::vector<Record> records_;
};

/// Throws Validation when `record` does not fit `schema` or contains a
/// forbidden combination.
void validate_record(const Record& record, const FactorSchema& schema);

/// Perfect encoding of every unconstrained t-way combination of a schema into
/// a dense integer range. Codes are subset-major: factor subsets in
/// lexicographic order, then mixed-radix values within a subset.
class CombinationCodec {
public:
    using Code = std::uint64_t;

    CombinationCodec(const FactorSchema& schema, Strength t);

    Strength strength() const noexcept { return t_; }
    std::size_t subset_count() const noexcept { return offsets_.size() - 1; }
    /// Size of the unconstrained t-way universe.
    Code total() const noexcept { return offsets_.back(); }

    std::span<const std::size_t> subset_factors(std::size_t subset) const {
        return {factors_.data() + subset * t_, t_};
    }

    /// Appends the C(k, t) codes of a full assignment, one per subset, in
    /// subset order.
    void encode_record(std::span<const ValueIndex> values, std::vector<Code>& out) const;

    Code encode(const ValueCombination& combination) const;
    ValueCombination decode(Code code) const;

    /// Codes of all combinations on `subset` that agree with `fixed` on the
    /// factors `fixed` mentions; `fixed` must reference only factors of the
    /// subset.
    void enumerate_matching(std::size_t subset, const ValueCombination& fixed,
                            std::vector<Code>& out) const;

    bool same_shape(const CombinationCodec& other) const noexcept {
        return t_ == other.t_ && domain_sizes_ == other.domain_sizes_;
    }

private:
    Strength t_;
    std::vector<std::size_t> domain_sizes_;
    std::vector<std::size_t> factors_; // subset_count * t
    std::vector<Code> strides_;        // subset_count * t
    std::vector<Code> offsets_;        // subset_count + 1
};

/// Exact, duplicate-free set of t-way value combinations.
class CombinationSet {
public:
    using Code = CombinationCodec::Code;

    explicit CombinationSet(std::shared_ptr<const CombinationCodec> codec,
                            std::vector<Code> codes = {});

    Strength strength() const noexcept { return codec_->strength(); }
    std::size_t size() const noexcept { return codes_.size(); }
    bool empty() const noexcept { return codes_.empty(); }
    bool contains(const ValueCombination& combination) const;
    bool contains_code(Code code) const;

    std::span<const Code> codes() const noexcept { return codes_; }
    const std::shared_ptr<const CombinationCodec>& codec() const noexcept { return codec_; }
    std::vector<ValueCombination> members() const;

    CombinationSet united(const CombinationSet& other) const;
    CombinationSet minus(const CombinationSet& other) const;
    CombinationSet intersected(const CombinationSet& other) const;

    bool operator==(const CombinationSet& other) const;

private:
    void require_compatible(const CombinationSet& other) const;

    std::shared_ptr<const CombinationCodec> codec_;
    std::vector<Code> codes_; // sorted, unique
};

/// Exact ratio of two counts; rendered to decimal only at output.
struct Ratio {
    std::uint64_t numerator = 0;
    std::uint64_t denominator = 1;

    double value() const noexcept {
        return static_cast<double>(numerator) / static_cast<double>(denominator);
    }
    std::string to_string() const; // "num/den"

    bool operator==(const Ratio&) const = default;
};

struct CoverageReport {
    Strength t = kDefaultStrength;
    std::uint64_t covered_count = 0;
    std::uint64_t universe_count = 0;
    Ratio cc;
};

struct SDCCReport {
    Strength t = kDefaultStrength;
    std::uint64_t target_count = 0;
    std::uint64_t missing_count = 0;
    Ratio sdcc;
    std::vector<ValueCombination> missing_combinations; // code order
    std::map<std::string, bool> per_record_flags;       // id -> covered
    std::map<std::string, std::size_t> per_record_missing;
};

CombinationSet combos_of_record(const Record& record, const FactorSchema& schema, Strength t);
CombinationSet build_combination_set(const Dataset& data, Strength t);
std::uint64_t universe_count(const FactorSchema& schema, Strength t);
CoverageReport combinatorial_coverage(const Dataset& data, Strength t);
SDCCReport set_difference_coverage(const Dataset& target, const Dataset& source, Strength t);

} // namespace sdcc
