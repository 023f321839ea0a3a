#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace splatguard {

enum class ErrorKind {
    FileNotFound,
    UnsupportedFormat,
    UnsupportedEncoding,
    CorruptData,
    IoError,
    DimensionMismatch,
    TooSmall,
    InvalidArgument,
    ZeroEnergy,
    InvalidMatrix,
    EmptyTrajectory,
    AllPairsDegenerate,
    SchemaError,
    NegativeCount,
    MatchedExceedsExtracted,
    NotPly,
    MissingProperty,
    NonPositiveScale,
    InvalidPose,
    InvalidConfig,
};

std::string_view to_string(ErrorKind kind);

// Every failure surfaced by the library carries one of the kinds above so
// callers (and the CLI exit-code mapping) can branch on it.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace splatguard
