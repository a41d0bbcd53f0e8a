#pragma once

#include <memory>
#include <string>
#include <vector>

#include "sdcc/coverage.hpp"

namespace testing_support {

/// Factors f0..f{k-1} with value labels "0".."n-1".
inline sdcc::SchemaPtr schema_of(const std::vector<int>& domains,
                                 std::vector<sdcc::ValueCombination> constraints = {}) {
    std::vector<sdcc::Factor> factors;
    for (std::size_t f = 0; f < domains.size(); ++f) {
        sdcc::Factor factor{"f" + std::to_string(f), {}};
        for (int v = 0; v < domains[f]; ++v)
            factor.values.push_back(std::to_string(v));
        factors.push_back(std::move(factor));
    }
    return std::make_shared<const sdcc::FactorSchema>(std::move(factors), std::move(constraints));
}

inline sdcc::Record record_of(std::string id, const std::vector<int>& row) {
    sdcc::Record r{std::move(id), {}};
    for (int v : row)
        r.values.push_back(static_cast<sdcc::ValueIndex>(v));
    return r;
}

inline sdcc::Dataset dataset_of(const sdcc::SchemaPtr& schema, const std::vector<std::vector<int>>& rows,
                                const std::string& prefix = "r") {
    std::vector<sdcc::Record> records;
    for (std::size_t i = 0; i < rows.size(); ++i)
        records.push_back(record_of(prefix + std::to_string(i), rows[i]));
    return sdcc::Dataset(schema, std::move(records));
}

} // namespace testing_support
