#pragma once

#include <stdexcept>
#include <string>

namespace seqeffect {

enum class ErrorCode {
  NotHermitian,
  NoConvergence,
  NotPSD,
  UnsupportedDim,
  DimMismatch,
  NotTracePreserving,
  IndexOutOfRange,
  NotAResolution,
  NotAffine,
  NotInvertible,
  UnclassifiedMap,
  InvalidTolerance,
  InvalidInput,
};

const char* to_string(ErrorCode code) noexcept;

/// Exception carrying a stable error code. The message is free-form.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::UnsupportedDim: return "UnsupportedDim";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::NotTracePreserving: return "NotTracePreserving";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NotAResolution: return "NotAResolution";
    case ErrorCode::NotAffine: return "NotAffine";
    case ErrorCode::NotInvertible: return "NotInvertible";
    case ErrorCode::UnclassifiedMap: return "UnclassifiedMap";
    case ErrorCode::InvalidTolerance: return "InvalidTolerance";
    case ErrorCode::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

}  // namespace seqeffect
