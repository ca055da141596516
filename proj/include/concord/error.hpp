#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace concord {

enum class ErrorCode {
    MalformedRow,
    NonPositivePrice,
    MissingQuarter,
    WindowTooSmall,
    SeriesTooShort,
    DegenerateInterval,
    SingularSystem,
    Infeasible,
    DegenerateFactor,
    RankDeficient,
    TooFewStages,
    ZeroVariance,
    ZeroSlopeSum,
    MissingPair,
    DuplicatePair,
    OutOfRangeValue,
    ScaleNotSupported,
    ZeroEntry,
    NoConvergence,
    WrongVectorCount,
    EmptyPanel,
    ConstantVector,
    FactorMismatch,
    FileNotFound,
    InvalidConfig,
    InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

    /// Same code, message prefixed with `context: `.
    Error with_context(const std::string& context) const;

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace concord
