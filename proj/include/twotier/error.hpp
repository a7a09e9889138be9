#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace twotier {

/// Failure categories raised across the library. The CLI maps these onto
/// its exit codes, so new kinds must also be added to that table.
enum class ErrorKind {
    // timeseries
    MalformedRow,
    GridMisalignment,
    IncompleteDay,
    NegativePower,
    TooFewDays,
    InsufficientHistory,
    InvalidArgument,
    // predictors
    InsufficientTrainingDays,
    UnsortedDistances,
    DimensionMismatch,
    GridMismatch,
    SingularStep,
    // local correction
    Underdetermined,
    NumericalFailure,
    IndexOutOfDay,
    // evaluation
    LengthMismatch,
    EmptyInput,
    // persistence
    ChecksumMismatch,
    UnsupportedVersion,
    InvariantViolation,
    ParseError,
    SinkWriteFailure,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace twotier
