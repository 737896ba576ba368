// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace usmb {

/// Failure categories surfaced by the library. The CLI maps them to exit codes.
enum class ErrorKind {
  DimensionMismatch,
  NonFiniteSample,
  NonPositiveSpeed,
  InvalidArgument,
  SingularMatrix,
  NoConvergence,
  AdjointMismatch,
  StepTooLarge,
  DepthExceedsWindow,
  EmptyEvents,
  ShapeMismatch,
  SingularCovariance,
  GridMismatch,
  AllZeroEnvelope,
  NoPeak,
  HalfLevelNotCrossed,
  EmptyRegion,
  ZeroMeanB,
  ZeroVarianceBoth,
  ZeroReference,
  BadMagic,
  TruncatedPayload,
  Io,
  Parse,
};

std::string_view kind_name(ErrorKind kind) noexcept;

/// what() reads "<kind-name>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& detail) {
  throw Error(kind, detail);
}

inline void require(bool condition, ErrorKind kind, const std::string& detail) {
  if (!condition) fail(kind, detail);
}

}  // namespace usmb
