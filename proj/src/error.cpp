#include "concord/error.hpp"

namespace concord {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::NonPositivePrice: return "NonPositivePrice";
    case ErrorCode::MissingQuarter: return "MissingQuarter";
    case ErrorCode::WindowTooSmall: return "WindowTooSmall";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::DegenerateInterval: return "DegenerateInterval";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::DegenerateFactor: return "DegenerateFactor";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::TooFewStages: return "TooFewStages";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::ZeroSlopeSum: return "ZeroSlopeSum";
    case ErrorCode::MissingPair: return "MissingPair";
    case ErrorCode::DuplicatePair: return "DuplicatePair";
    case ErrorCode::OutOfRangeValue: return "OutOfRangeValue";
    case ErrorCode::ScaleNotSupported: return "ScaleNotSupported";
    case ErrorCode::ZeroEntry: return "ZeroEntry";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::WrongVectorCount: return "WrongVectorCount";
    case ErrorCode::EmptyPanel: return "EmptyPanel";
    case ErrorCode::ConstantVector: return "ConstantVector";
    case ErrorCode::FactorMismatch: return "FactorMismatch";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

Error Error::with_context(const std::string& context) const {
    std::string msg = what();
    // strip our own "Code: " prefix so it is not repeated
    const auto prefix = std::string(to_string(code_)) + ": ";
    if (msg.rfind(prefix, 0) == 0) {
        msg.erase(0, prefix.size());
    }
    return Error(code_, context + ": " + msg);
}

void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace concord
