#include "splatguard/error.hpp"

namespace splatguard {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::FileNotFound: return "FileNotFound";
    case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::UnsupportedEncoding: return "UnsupportedEncoding";
    case ErrorKind::CorruptData: return "CorruptData";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::TooSmall: return "TooSmall";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ZeroEnergy: return "ZeroEnergy";
    case ErrorKind::InvalidMatrix: return "InvalidMatrix";
    case ErrorKind::EmptyTrajectory: return "EmptyTrajectory";
    case ErrorKind::AllPairsDegenerate: return "AllPairsDegenerate";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::NegativeCount: return "NegativeCount";
    case ErrorKind::MatchedExceedsExtracted: return "MatchedExceedsExtracted";
    case ErrorKind::NotPly: return "NotPly";
    case ErrorKind::MissingProperty: return "MissingProperty";
    case ErrorKind::NonPositiveScale: return "NonPositiveScale";
    case ErrorKind::InvalidPose: return "InvalidPose";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

} // namespace splatguard
