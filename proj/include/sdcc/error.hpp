#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sdcc {

/// Categories used for error reporting and CLI exit codes.
enum class ErrorKind {
    Validation,           // input does not satisfy a schema/dataset invariant
    Strength,             // t outside [1, k]
    DegenerateSchema,     // empty combination universe
    UndefinedRatio,       // ratio with zero denominator (e.g. empty target)
    Fit,                  // fitting an artifact from unusable data
    Ingestion,            // unparseable or non-finite input
    DegenerateProjection, // principal components are not uniquely defined
    Selection,            // labeling batch request cannot be satisfied
    Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace sdcc
