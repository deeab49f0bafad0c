#include "tdr/error.hpp"

namespace tdr {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::DOutOfRange: return "DOutOfRange";
    case ErrorCode::KOutOfRange: return "KOutOfRange";
    case ErrorCode::SigmaNonPositive: return "SigmaNonPositive";
    case ErrorCode::WrongWeightKind: return "WrongWeightKind";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::LabelCountMismatch: return "LabelCountMismatch";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::EmptyTrainSet: return "EmptyTrainSet";
    case ErrorCode::ClassTooSmall: return "ClassTooSmall";
    case ErrorCode::AllSamplesIdentical: return "AllSamplesIdentical";
    case ErrorCode::ConjugateSymmetryViolation: return "ConjugateSymmetryViolation";
    case ErrorCode::FirstSliceNotReal: return "FirstSliceNotReal";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::BNotPositiveDefinite: return "BNotPositiveDefinite";
    case ErrorCode::NotFDiagonalizable: return "NotFDiagonalizable";
    case ErrorCode::NotFSymmetric: return "NotFSymmetric";
    case ErrorCode::NotFPositiveSemidefinite: return "NotFPositiveSemidefinite";
    case ErrorCode::SingularLocalGram: return "SingularLocalGram";
    case ErrorCode::DegenerateGram: return "DegenerateGram";
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
  }
  return "Unknown";
}

ErrorCategory category(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::DOutOfRange:
    case ErrorCode::KOutOfRange:
    case ErrorCode::SigmaNonPositive:
    case ErrorCode::WrongWeightKind:
      return ErrorCategory::Usage;
    case ErrorCode::DimensionMismatch:
    case ErrorCode::NotSquare:
    case ErrorCode::NonFinite:
    case ErrorCode::BadMagic:
    case ErrorCode::TruncatedFile:
    case ErrorCode::LabelCountMismatch:
    case ErrorCode::IoError:
    case ErrorCode::EmptyTrainSet:
    case ErrorCode::ClassTooSmall:
    case ErrorCode::AllSamplesIdentical:
      return ErrorCategory::Data;
    default:
      return ErrorCategory::Numerical;
  }
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace tdr
