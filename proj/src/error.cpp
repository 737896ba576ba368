// SPDX-License-Identifier: Apache-2.0
#include "usmb/error.hpp"

namespace usmb {

std::string_view kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    case ErrorKind::NonFiniteSample: return "non-finite-sample";
    case ErrorKind::NonPositiveSpeed: return "non-positive-speed";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::SingularMatrix: return "singular-matrix";
    case ErrorKind::NoConvergence: return "no-convergence";
    case ErrorKind::AdjointMismatch: return "adjoint-mismatch";
    case ErrorKind::StepTooLarge: return "step-too-large";
    case ErrorKind::DepthExceedsWindow: return "depth-exceeds-window";
    case ErrorKind::EmptyEvents: return "empty-events";
    case ErrorKind::ShapeMismatch: return "shape-mismatch";
    case ErrorKind::SingularCovariance: return "singular-covariance";
    case ErrorKind::GridMismatch: return "grid-mismatch";
    case ErrorKind::AllZeroEnvelope: return "all-zero-envelope";
    case ErrorKind::NoPeak: return "no-peak";
    case ErrorKind::HalfLevelNotCrossed: return "half-level-not-crossed";
    case ErrorKind::EmptyRegion: return "empty-region";
    case ErrorKind::ZeroMeanB: return "zero-mean-b";
    case ErrorKind::ZeroVarianceBoth: return "zero-variance-both";
    case ErrorKind::ZeroReference: return "zero-reference";
    case ErrorKind::BadMagic: return "bad-magic";
    case ErrorKind::TruncatedPayload: return "truncated-payload";
    case ErrorKind::Io: return "io-error";
    case ErrorKind::Parse: return "parse-error";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(kind_name(kind)) + ": " + detail), kind_(kind) {}

}  // namespace usmb
