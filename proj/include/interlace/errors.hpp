#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace interlace {

// Failure classes surfaced by the library. The CLI maps every code to a
// machine-readable string and exit code 2 (validation) or 1 (bound violated).
enum class ErrorCode {
  NotHermitian,
  NotPSD,
  NotRealRooted,
  ZeroPolynomial,
  BadWeights,
  BadPoints,
  PointNotAboveRoots,
  BadIndex,
  DimensionTooLarge,
  SingularPoint,
  PreconditionUnverifiable,
  PreconditionFailed,
  CrossCheckFailed,
  NotRankOne,
  BudgetExceeded,
  ShapeMismatch,
  NotProjection,
  NotContraction,
  NotSelfAdjoint,
  BadEpsilon,
  NonzeroDiagonal,
  BadPartition,
  BadInput,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::NotRealRooted: return "NotRealRooted";
    case ErrorCode::ZeroPolynomial: return "ZeroPolynomial";
    case ErrorCode::BadWeights: return "BadWeights";
    case ErrorCode::BadPoints: return "BadPoints";
    case ErrorCode::PointNotAboveRoots: return "PointNotAboveRoots";
    case ErrorCode::BadIndex: return "BadIndex";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::SingularPoint: return "SingularPoint";
    case ErrorCode::PreconditionUnverifiable: return "PreconditionUnverifiable";
    case ErrorCode::PreconditionFailed: return "PreconditionFailed";
    case ErrorCode::CrossCheckFailed: return "CrossCheckFailed";
    case ErrorCode::NotRankOne: return "NotRankOne";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NotProjection: return "NotProjection";
    case ErrorCode::NotContraction: return "NotContraction";
    case ErrorCode::NotSelfAdjoint: return "NotSelfAdjoint";
    case ErrorCode::BadEpsilon: return "BadEpsilon";
    case ErrorCode::NonzeroDiagonal: return "NonzeroDiagonal";
    case ErrorCode::BadPartition: return "BadPartition";
    case ErrorCode::BadInput: return "BadInput";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Carries the offending root so callers can report where real-rootedness broke.
class NotRealRootedError : public Error {
 public:
  NotRealRootedError(std::complex<double> root, const std::string& what)
      : Error(ErrorCode::NotRealRooted, what), root_(root) {}

  std::complex<double> offending_root() const noexcept { return root_; }

 private:
  std::complex<double> root_;
};

}  // namespace interlace
