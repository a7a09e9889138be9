#include "twotier/error.hpp"

namespace twotier {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::MalformedRow: return "MalformedRow";
        case ErrorKind::GridMisalignment: return "GridMisalignment";
        case ErrorKind::IncompleteDay: return "IncompleteDay";
        case ErrorKind::NegativePower: return "NegativePower";
        case ErrorKind::TooFewDays: return "TooFewDays";
        case ErrorKind::InsufficientHistory: return "InsufficientHistory";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::InsufficientTrainingDays: return "InsufficientTrainingDays";
        case ErrorKind::UnsortedDistances: return "UnsortedDistances";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::GridMismatch: return "GridMismatch";
        case ErrorKind::SingularStep: return "SingularStep";
        case ErrorKind::Underdetermined: return "Underdetermined";
        case ErrorKind::NumericalFailure: return "NumericalFailure";
        case ErrorKind::IndexOutOfDay: return "IndexOutOfDay";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::EmptyInput: return "EmptyInput";
        case ErrorKind::ChecksumMismatch: return "ChecksumMismatch";
        case ErrorKind::UnsupportedVersion: return "UnsupportedVersion";
        case ErrorKind::InvariantViolation: return "InvariantViolation";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::SinkWriteFailure: return "SinkWriteFailure";
    }
    return "Unknown";
}

}  // namespace twotier
