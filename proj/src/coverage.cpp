#include "sdcc/coverage.hpp"

#include <algorithm>
#include <iterator>
#include <numeric>
#include <unordered_set>

namespace sdcc {

namespace {

[[noreturn]] void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

} // namespace

// ---------------------------------------------------------------------------
// ValueCombination

ValueCombination::ValueCombination(std::vector<Assignment> pairs) : pairs_(std::move(pairs)) {
    if (pairs_.empty())
        fail(ErrorKind::Validation, "value combination must have at least one pair");
    std::sort(pairs_.begin(), pairs_.end());
    for (std::size_t i = 1; i < pairs_.size(); ++i) {
        if (pairs_[i].factor == pairs_[i - 1].factor)
            fail(ErrorKind::Validation, "value combination repeats factor index " +
                                            std::to_string(pairs_[i].factor));
    }
}

bool ValueCombination::contains(const ValueCombination& other) const noexcept {
    return std::includes(pairs_.begin(), pairs_.end(), other.pairs_.begin(), other.pairs_.end());
}

// ---------------------------------------------------------------------------
// FactorSchema

FactorSchema::FactorSchema(std::vector<Factor> factors, std::vector<ValueCombination> constraints)
    : factors_(std::move(factors)), constraints_(std::move(constraints)) {
    if (factors_.empty())
        fail(ErrorKind::Validation, "schema must declare at least one factor");

    std::unordered_set<std::string> names;
    for (const auto& f : factors_) {
        if (f.name.empty())
            fail(ErrorKind::Validation, "factor names must be non-empty");
        if (!names.insert(f.name).second)
            fail(ErrorKind::Validation, "duplicate factor name '" + f.name + "'");
        if (f.values.size() < 2)
            fail(ErrorKind::Validation, "factor '" + f.name + "' needs at least 2 values");
        std::unordered_set<std::string> labels;
        for (const auto& v : f.values) {
            if (v.empty())
                fail(ErrorKind::Validation, "factor '" + f.name + "' has an empty value label");
            if (!labels.insert(v).second)
                fail(ErrorKind::Validation,
                     "factor '" + f.name + "' repeats value label '" + v + "'");
        }
    }

    for (const auto& c : constraints_) {
        if (c.strength() == 0)
            fail(ErrorKind::Validation, "constraint must reference at least one factor");
        for (const auto& p : c.pairs()) {
            if (p.factor >= factors_.size())
                fail(ErrorKind::Validation, "constraint references unknown factor index " +
                                                std::to_string(p.factor));
            if (p.value >= factors_[p.factor].values.size())
                fail(ErrorKind::Validation, "constraint references unknown value index " +
                                                std::to_string(p.value) + " of factor '" +
                                                factors_[p.factor].name + "'");
        }
    }
    std::sort(constraints_.begin(), constraints_.end());
    constraints_.erase(std::unique(constraints_.begin(), constraints_.end()), constraints_.end());
}

std::optional<std::size_t> FactorSchema::find_factor(std::string_view name) const {
    for (std::size_t i = 0; i < factors_.size(); ++i)
        if (factors_[i].name == name)
            return i;
    return std::nullopt;
}

std::optional<ValueIndex> FactorSchema::find_value(std::size_t factor, std::string_view label) const {
    const auto& values = factors_.at(factor).values;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] == label)
            return static_cast<ValueIndex>(i);
    return std::nullopt;
}

void FactorSchema::check_strength(Strength t) const {
    if (t < 1 || t > factors_.size())
        fail(ErrorKind::Strength, "strength t=" + std::to_string(t) + " outside [1, " +
                                      std::to_string(factors_.size()) + "]");
}

std::string FactorSchema::describe(const ValueCombination& combination) const {
    std::string out = "{";
    bool first = true;
    for (const auto& p : combination.pairs()) {
        if (!first)
            out += ", ";
        first = false;
        const auto& f = factors_.at(p.factor);
        out += f.name + "=" + f.values.at(p.value);
    }
    return out + "}";
}

// ---------------------------------------------------------------------------
// Record / Dataset

void validate_record(const Record& record, const FactorSchema& schema) {
    if (record.id.empty())
        fail(ErrorKind::Validation, "record id must be non-empty");
    if (record.values.size() != schema.factor_count())
        fail(ErrorKind::Validation, "record '" + record.id + "' has " +
                                        std::to_string(record.values.size()) +
                                        " values, schema has " +
                                        std::to_string(schema.factor_count()) + " factors");
    for (std::size_t f = 0; f < record.values.size(); ++f) {
        if (record.values[f] >= schema.domain_size(f))
            fail(ErrorKind::Validation, "record '" + record.id + "' value index " +
                                            std::to_string(record.values[f]) +
                                            " out of range for factor '" +
                                            schema.factor(f).name + "'");
    }
    for (const auto& c : schema.constraints()) {
        const bool hit = std::all_of(c.pairs().begin(), c.pairs().end(), [&](const Assignment& p) {
            return record.values[p.factor] == p.value;
        });
        if (hit)
            fail(ErrorKind::Validation, "record '" + record.id +
                                            "' contains forbidden combination " +
                                            schema.describe(c));
    }
}

Dataset::Dataset(SchemaPtr schema, std::vector<Record> records)
    : schema_(std::move(schema)), records_(std::move(records)) {
    if (!schema_)
        fail(ErrorKind::Validation, "dataset requires a schema");
    std::unordered_set<std::string_view> ids;
    ids.reserve(records_.size());
    for (const auto& r : records_) {
        validate_record(r, *schema_);
        if (!ids.insert(r.id).second)
            fail(ErrorKind::Validation, "duplicate record id '" + r.id + "'");
    }
}

void Dataset::check_same_schema(const Dataset& other) const {
    if (schema_ != other.schema_ && !(*schema_ == *other.schema_))
        fail(ErrorKind::Validation, "datasets use different schemas");
}

// ---------------------------------------------------------------------------
// CombinationCodec

CombinationCodec::CombinationCodec(const FactorSchema& schema, Strength t) : t_(t) {
    schema.check_strength(t);
    const std::size_t k = schema.factor_count();
    domain_sizes_.reserve(k);
    for (std::size_t f = 0; f < k; ++f)
        domain_sizes_.push_back(schema.domain_size(f));

    std::vector<std::size_t> subset(t);
    std::iota(subset.begin(), subset.end(), std::size_t{0});
    offsets_.push_back(0);
    while (true) {
        Code product = 1;
        std::vector<Code> strides(t);
        for (std::size_t j = t; j-- > 0;) {
            strides[j] = product;
            if (__builtin_mul_overflow(product, static_cast<Code>(domain_sizes_[subset[j]]), &product))
                fail(ErrorKind::Validation, "t-way combination universe exceeds 64-bit range");
        }
        Code next = 0;
        if (__builtin_add_overflow(offsets_.back(), product, &next))
            fail(ErrorKind::Validation, "t-way combination universe exceeds 64-bit range");
        factors_.insert(factors_.end(), subset.begin(), subset.end());
        strides_.insert(strides_.end(), strides.begin(), strides.end());
        offsets_.push_back(next);

        // advance to the next lexicographic t-subset of {0..k-1}
        std::size_t i = t;
        while (i > 0 && subset[i - 1] == k - t + (i - 1))
            --i;
        if (i == 0)
            break;
        ++subset[i - 1];
        for (std::size_t j = i; j < t; ++j)
            subset[j] = subset[j - 1] + 1;
    }
}

void CombinationCodec::encode_record(std::span<const ValueIndex> values, std::vector<Code>& out) const {
    const std::size_t subsets = subset_count();
    out.reserve(out.size() + subsets);
    const std::size_t* f = factors_.data();
    const Code* s = strides_.data();
    for (std::size_t i = 0; i < subsets; ++i) {
        Code code = offsets_[i];
        for (std::size_t j = 0; j < t_; ++j)
            code += static_cast<Code>(values[*f++]) * *s++;
        out.push_back(code);
    }
}

CombinationCodec::Code CombinationCodec::encode(const ValueCombination& combination) const {
    if (combination.strength() != t_)
        fail(ErrorKind::Strength, "combination has strength " +
                                      std::to_string(combination.strength()) + ", expected " +
                                      std::to_string(t_));
    const auto pairs = combination.pairs();
    std::vector<std::size_t> key;
    key.reserve(t_);
    for (const auto& p : pairs) {
        if (p.factor >= domain_sizes_.size() || p.value >= domain_sizes_[p.factor])
            fail(ErrorKind::Validation, "combination is outside the schema");
        key.push_back(p.factor);
    }

    std::size_t lo = 0;
    std::size_t hi = subset_count();
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        const auto sub = subset_factors(mid);
        if (std::lexicographical_compare(sub.begin(), sub.end(), key.begin(), key.end()))
            lo = mid + 1;
        else
            hi = mid;
    }
    Code code = offsets_[lo];
    for (std::size_t j = 0; j < t_; ++j)
        code += static_cast<Code>(pairs[j].value) * strides_[lo * t_ + j];
    return code;
}

ValueCombination CombinationCodec::decode(Code code) const {
    if (code >= total())
        fail(ErrorKind::Validation, "combination code out of range");
    const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), code);
    const std::size_t subset = static_cast<std::size_t>(std::distance(offsets_.begin(), it)) - 1;
    Code rem = code - offsets_[subset];
    std::vector<Assignment> pairs(t_);
    for (std::size_t j = 0; j < t_; ++j) {
        const Code stride = strides_[subset * t_ + j];
        pairs[j] = {factors_[subset * t_ + j], static_cast<ValueIndex>(rem / stride)};
        rem %= stride;
    }
    return ValueCombination(std::move(pairs));
}

void CombinationCodec::enumerate_matching(std::size_t subset, const ValueCombination& fixed,
                                          std::vector<Code>& out) const {
    const auto factors = subset_factors(subset);
    Code base = offsets_[subset];
    std::vector<std::size_t> free_positions;
    std::size_t next_fixed = 0;
    const auto pairs = fixed.pairs();
    for (std::size_t j = 0; j < t_; ++j) {
        if (next_fixed < pairs.size() && pairs[next_fixed].factor == factors[j]) {
            base += static_cast<Code>(pairs[next_fixed].value) * strides_[subset * t_ + j];
            ++next_fixed;
        } else {
            free_positions.push_back(j);
        }
    }
    if (next_fixed != pairs.size())
        fail(ErrorKind::Validation, "fixed combination is not on this factor subset");

    std::vector<std::size_t> digits(free_positions.size(), 0);
    while (true) {
        Code code = base;
        for (std::size_t i = 0; i < digits.size(); ++i)
            code += static_cast<Code>(digits[i]) * strides_[subset * t_ + free_positions[i]];
        out.push_back(code);

        std::size_t i = digits.size();
        for (; i > 0; --i) {
            if (++digits[i - 1] < domain_sizes_[factors[free_positions[i - 1]]])
                break;
            digits[i - 1] = 0;
        }
        if (i == 0)
            return;
    }
}

// ---------------------------------------------------------------------------
// CombinationSet

CombinationSet::CombinationSet(std::shared_ptr<const CombinationCodec> codec, std::vector<Code> codes)
    : codec_(std::move(codec)), codes_(std::move(codes)) {
    if (!codec_)
        fail(ErrorKind::Validation, "combination set requires a codec");
    std::sort(codes_.begin(), codes_.end());
    codes_.erase(std::unique(codes_.begin(), codes_.end()), codes_.end());
    if (!codes_.empty() && codes_.back() >= codec_->total())
        fail(ErrorKind::Validation, "combination code out of range");
}

bool CombinationSet::contains_code(Code code) const {
    return std::binary_search(codes_.begin(), codes_.end(), code);
}

bool CombinationSet::contains(const ValueCombination& combination) const {
    if (combination.strength() != strength())
        return false;
    return contains_code(codec_->encode(combination));
}

std::vector<ValueCombination> CombinationSet::members() const {
    std::vector<ValueCombination> out;
    out.reserve(codes_.size());
    for (Code c : codes_)
        out.push_back(codec_->decode(c));
    return out;
}

void CombinationSet::require_compatible(const CombinationSet& other) const {
    if (codec_ != other.codec_ && !codec_->same_shape(*other.codec_))
        fail(ErrorKind::Validation, "combination sets differ in schema or strength");
}

CombinationSet CombinationSet::united(const CombinationSet& other) const {
    require_compatible(other);
    std::vector<Code> out;
    out.reserve(codes_.size() + other.codes_.size());
    std::set_union(codes_.begin(), codes_.end(), other.codes_.begin(), other.codes_.end(),
                   std::back_inserter(out));
    return CombinationSet(codec_, std::move(out));
}

CombinationSet CombinationSet::minus(const CombinationSet& other) const {
    require_compatible(other);
    std::vector<Code> out;
    std::set_difference(codes_.begin(), codes_.end(), other.codes_.begin(), other.codes_.end(),
                        std::back_inserter(out));
    return CombinationSet(codec_, std::move(out));
}

CombinationSet CombinationSet::intersected(const CombinationSet& other) const {
    require_compatible(other);
    std::vector<Code> out;
    std::set_intersection(codes_.begin(), codes_.end(), other.codes_.begin(), other.codes_.end(),
                          std::back_inserter(out));
    return CombinationSet(codec_, std::move(out));
}

bool CombinationSet::operator==(const CombinationSet& other) const {
    return codec_->same_shape(*other.codec_) && codes_ == other.codes_;
}

std::string Ratio::to_string() const {
    return std::to_string(numerator) + "/" + std::to_string(denominator);
}

// ---------------------------------------------------------------------------
// Operations

CombinationSet combos_of_record(const Record& record, const FactorSchema& schema, Strength t) {
    schema.check_strength(t);
    validate_record(record, schema);
    auto codec = std::make_shared<const CombinationCodec>(schema, t);
    std::vector<CombinationCodec::Code> codes;
    codec->encode_record(record.values, codes);
    return CombinationSet(std::move(codec), std::move(codes));
}

namespace {

CombinationSet collect(const Dataset& data, std::shared_ptr<const CombinationCodec> codec) {
    std::vector<CombinationCodec::Code> codes;
    codes.reserve(data.size() * codec->subset_count());
    for (const auto& r : data.records())
        codec->encode_record(r.values, codes);
    return CombinationSet(std::move(codec), std::move(codes));
}

} // namespace

CombinationSet build_combination_set(const Dataset& data, Strength t) {
    return collect(data, std::make_shared<const CombinationCodec>(data.schema(), t));
}

std::uint64_t universe_count(const FactorSchema& schema, Strength t) {
    const CombinationCodec codec(schema, t);
    if (schema.constraints().empty())
        return codec.total();

    // A t-way combination is invalid when it contains a forbidden combination.
    std::vector<CombinationCodec::Code> invalid;
    for (const auto& c : schema.constraints()) {
        if (c.strength() > t)
            continue;
        for (std::size_t s = 0; s < codec.subset_count(); ++s) {
            const auto factors = codec.subset_factors(s);
            const bool covers = std::all_of(c.pairs().begin(), c.pairs().end(), [&](const Assignment& p) {
                return std::binary_search(factors.begin(), factors.end(), p.factor);
            });
            if (covers)
                codec.enumerate_matching(s, c, invalid);
        }
    }
    std::sort(invalid.begin(), invalid.end());
    invalid.erase(std::unique(invalid.begin(), invalid.end()), invalid.end());
    return codec.total() - invalid.size();
}

CoverageReport combinatorial_coverage(const Dataset& data, Strength t) {
    const std::uint64_t universe = universe_count(data.schema(), t);
    if (universe == 0)
        fail(ErrorKind::DegenerateSchema, "schema constraints leave no valid t-way combination");
    const auto covered = build_combination_set(data, t);
    CoverageReport report;
    report.t = t;
    report.covered_count = covered.size();
    report.universe_count = universe;
    report.cc = {covered.size(), universe};
    return report;
}

SDCCReport set_difference_coverage(const Dataset& target, const Dataset& source, Strength t) {
    target.check_same_schema(source);
    target.schema().check_strength(t);
    if (target.empty())
        fail(ErrorKind::UndefinedRatio, "SDCC is undefined for an empty target dataset");

    auto codec = std::make_shared<const CombinationCodec>(target.schema(), t);
    const auto target_set = collect(target, codec);
    const auto source_set = collect(source, codec);
    const auto missing = target_set.minus(source_set);

    SDCCReport report;
    report.t = t;
    report.target_count = target_set.size();
    report.missing_count = missing.size();
    report.sdcc = {missing.size(), target_set.size()};
    report.missing_combinations = missing.members();

    std::vector<CombinationCodec::Code> codes;
    for (const auto& r : target.records()) {
        codes.clear();
        codec->encode_record(r.values, codes);
        const auto n = static_cast<std::size_t>(std::count_if(
            codes.begin(), codes.end(), [&](auto c) { return missing.contains_code(c); }));
        report.per_record_flags.emplace(r.id, n == 0);
        report.per_record_missing.emplace(r.id, n);
    }
    return report;
}

} // namespace sdcc
