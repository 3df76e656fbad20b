#pragma once

#include <stdexcept>
#include <string>

namespace pqlab {

enum class ErrorCode {
  InvalidArgument,
  DegenerateShape,
  GridTooCoarse,
  ZeroField,
  NonConvergence,
  ProjectionInfeasible,
  GateRefused,
  Io,
};

/// Exception carrying a machine-readable code; the CLI maps codes to exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::DegenerateShape: return "degenerate-shape";
    case ErrorCode::GridTooCoarse: return "grid-too-coarse";
    case ErrorCode::ZeroField: return "zero-field";
    case ErrorCode::NonConvergence: return "non-convergence";
    case ErrorCode::ProjectionInfeasible: return "projection-infeasible";
    case ErrorCode::GateRefused: return "gate-refused";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

}  // namespace pqlab
