#include "sdcc/error.hpp"

namespace sdcc {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Strength: return "strength";
    case ErrorKind::DegenerateSchema: return "degenerate-schema";
    case ErrorKind::UndefinedRatio: return "undefined-ratio";
    case ErrorKind::Fit: return "fit";
    case ErrorKind::Ingestion: return "ingestion";
    case ErrorKind::DegenerateProjection: return "degenerate-projection";
    case ErrorKind::Selection: return "selection";
    case ErrorKind::Io: return "io";
    }
    return "unknown";
}

} // namespace sdcc
