#pragma once

#include <stdexcept>
#include <string>

namespace ptpoint {

enum class ErrorCode {
  InvalidParams,
  NotInFamily,
  Degenerate,
  RankDeficient,
  DegenerateIdenticallyZero,
  ContourThroughZero,
  NoConvergence,
  NotAnEigenvalue,
  SpectrumPoint,
  InvalidRegion,
  AsymmetricGrid,
  ResonantK,
  GridCollision,
  GridMismatch,
  EigensolverFailure,
  ParseError,
};

inline const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::NotInFamily: return "NotInFamily";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::DegenerateIdenticallyZero: return "DegenerateIdenticallyZero";
    case ErrorCode::ContourThroughZero: return "ContourThroughZero";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotAnEigenvalue: return "NotAnEigenvalue";
    case ErrorCode::SpectrumPoint: return "SpectrumPoint";
    case ErrorCode::InvalidRegion: return "InvalidRegion";
    case ErrorCode::AsymmetricGrid: return "AsymmetricGrid";
    case ErrorCode::ResonantK: return "ResonantK";
    case ErrorCode::GridCollision: return "GridCollision";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::EigensolverFailure: return "EigensolverFailure";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// The single exception type thrown by the library; `code()` identifies the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ptpoint
