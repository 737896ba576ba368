// SPDX-License-Identifier: Apache-2.0
//
// Time-of-flight delays, delay-and-interpolate focusing, and the envelope /
// log-compression steps of B-mode display.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "usmb/core.hpp"

namespace usmb::tof {

/// Two-way delays in seconds, layout [event][channel][ix][iz].
struct DelayTensor {
  std::size_t num_events = 0;
  std::size_t num_channels = 0;
  std::size_t nx = 0;
  std::size_t nz = 0;
  std::vector<double> delays;

  std::size_t index(std::size_t e, std::size_t c, std::size_t ix, std::size_t iz) const noexcept {
    return ((e * num_channels + c) * nx + ix) * nz + iz;
  }
  double at(std::size_t e, std::size_t c, std::size_t ix, std::size_t iz) const {
    return delays[index(e, c, ix, iz)];
  }
};

DelayTensor compute_delays(const TransducerArray& array, std::span<const TransmitEvent> events,
                           const ImagingGrid& grid, double speed);

enum class Compounding {
  Sum,    // coherent sum over events, one output event
  Stack,  // one output event per transmit
};

struct FocusOptions {
  Compounding compounding = Compounding::Sum;
  /// Convert each channel trace to its analytic signal before interpolation,
  /// yielding IQ channel vectors. Off: the real samples are interpolated.
  bool analytic = true;
};

/// Linear interpolation of each trace at t = tau * fs. Delays outside
/// [0, (Nt-1)/fs] contribute zero.
FocusedTensor focus(const RfDataCube& cube, const DelayTensor& delays, const ImagingGrid& grid,
                    const FocusOptions& options = {});

/// Analytic signal via FFT: negative frequencies zeroed, positive doubled,
/// DC and Nyquist kept.
std::vector<cplx> analytic_signal(std::span<const double> x);

/// |analytic signal| along each axial line (fixed ix). Requires nz >= 4.
RealImage envelope(const RealImage& rf);
/// For IQ data the envelope is the magnitude.
RealImage envelope(const ComplexImage& iq);

/// 20 log10(env / max(env)), clamped to [-dynamic_range_db, 0].
RealImage log_compress(const RealImage& envelope, double dynamic_range_db);

}  // namespace usmb::tof
