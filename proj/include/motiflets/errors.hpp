#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace motiflets {

/// Error categories. The numeric value doubles as the CLI exit status.
enum class ErrorCode : int {
    kParameter = 2,
    kFeasibility = 3,
    kResource = 4,
    kIo = 5,
};

[[nodiscard]] constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::kParameter: return "parameter";
        case ErrorCode::kFeasibility: return "feasibility";
        case ErrorCode::kResource: return "resource";
        case ErrorCode::kIo: return "io";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

struct ParameterError : Error {
    explicit ParameterError(const std::string& message) : Error(ErrorCode::kParameter, message) {}
};

/// A flat window was hit while the series is configured with FlatPolicy::kStrict.
struct DegenerateWindowError : ParameterError {
    using ParameterError::ParameterError;
};

struct FeasibilityError : Error {
    explicit FeasibilityError(const std::string& message) : Error(ErrorCode::kFeasibility, message) {}
};

/// Memory budget or enumeration ceiling exceeded.
struct ResourceError : Error {
    explicit ResourceError(const std::string& message) : Error(ErrorCode::kResource, message) {}
};

struct IoError : Error {
    explicit IoError(const std::string& message) : Error(ErrorCode::kIo, message) {}
};

/// Caller broke a documented precondition (e.g. overlapping candidate set).
struct ContractViolation : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace motiflets
