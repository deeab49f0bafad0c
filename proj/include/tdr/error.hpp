#pragma once

#include <stdexcept>
#include <string>

namespace tdr {

enum class ErrorCode {
  // usage / configuration
  InvalidConfig,
  DOutOfRange,
  KOutOfRange,
  SigmaNonPositive,
  WrongWeightKind,
  // data
  DimensionMismatch,
  NotSquare,
  NonFinite,
  BadMagic,
  TruncatedFile,
  LabelCountMismatch,
  IoError,
  EmptyTrainSet,
  ClassTooSmall,
  AllSamplesIdentical,
  // numerical
  ConjugateSymmetryViolation,
  FirstSliceNotReal,
  NotHermitian,
  NoConvergence,
  BNotPositiveDefinite,
  NotFDiagonalizable,
  NotFSymmetric,
  NotFPositiveSemidefinite,
  SingularLocalGram,
  DegenerateGram,
  DisconnectedGraph,
};

enum class ErrorCategory { Usage, Data, Numerical };

const char* to_string(ErrorCode code) noexcept;
ErrorCategory category(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace tdr
