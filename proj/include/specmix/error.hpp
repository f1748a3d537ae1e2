#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace specmix {

/// Stable error categories. The CLI maps these to exit codes and prints the
/// category name so scripts can match on it.
enum class ErrorCode {
    InvalidArgument,   ///< precondition on a call argument violated
    DimensionMismatch,
    Io,                ///< unreadable / unwritable file
    Parse,             ///< malformed CSV, schema or grid config
    EmptyDataset,
    NumericRequired,   ///< pipeline needs R >= 1
    CategoricalRequired,
    DegenerateGraph,   ///< zero degree, empty cluster volume, zero-count category
    SpectralGap,       ///< transfer-cut lift singularity
    NoConvergence,
};

inline std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "invalid_argument";
        case ErrorCode::DimensionMismatch: return "dimension_mismatch";
        case ErrorCode::Io: return "io";
        case ErrorCode::Parse: return "parse";
        case ErrorCode::EmptyDataset: return "empty_dataset";
        case ErrorCode::NumericRequired: return "numeric_required";
        case ErrorCode::CategoricalRequired: return "categorical_required";
        case ErrorCode::DegenerateGraph: return "degenerate_graph";
        case ErrorCode::SpectralGap: return "spectral_gap";
        case ErrorCode::NoConvergence: return "no_convergence";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

namespace detail {
inline void require(bool cond, ErrorCode code, const std::string& msg) {
    if (!cond) throw Error(code, msg);
}
}  // namespace detail

}  // namespace specmix
