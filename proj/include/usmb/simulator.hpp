// SPDX-License-Identifier: Apache-2.0
//
// Linear point-scatterer pulse-echo model. No attenuation, directivity or
// multiple scattering: every sample is a superposition of delayed pulses plus
// white Gaussian noise.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "usmb/core.hpp"

namespace usmb::sim {

struct PulseModel {
  double center_frequency = 5e6;
  double fractional_bandwidth = 0.6;  // in (0, 2)
  double amplitude = 1.0;

  /// Standard deviation of the Gaussian envelope, seconds.
  double envelope_sigma() const;
};

/// amplitude * exp(-t^2 / (2 sigma_t^2)) * cos(2 pi f0 t).
double gaussian_pulse(const PulseModel& pulse, double t);

/// Two-way travel time (t0 + transmit leg + receive leg) for one event,
/// receive element and point. Shared with the TOF module so simulation and
/// focusing agree on geometry.
double two_way_delay(const TransmitEvent& event, Point element, Point target, double speed);

struct SimulationParams {
  double speed_of_sound = 1540.0;
  std::size_t num_samples = 0;
  double noise_std = 0.0;
  std::uint64_t seed = 0;
};

/// Noise for (event e, channel c) is drawn from CounterRng(seed, e * C + c)
/// so the result does not depend on evaluation order or thread count.
RfDataCube simulate(const TransducerArray& array, std::span<const TransmitEvent> events,
                    const ScattererField& field, const PulseModel& pulse,
                    const SimulationParams& params);

/// Smallest Nt that holds the deepest two-way delay plus the pulse tail.
std::size_t required_samples(const TransducerArray& array, std::span<const TransmitEvent> events,
                             const ScattererField& field, const PulseModel& pulse, double speed);

/// Uniform random speckle scatterers in a rectangle with an anechoic disk
/// removed. Amplitudes are standard normal.
ScattererField cyst_phantom(std::size_t num_scatterers, double x_min, double x_max, double z_min,
                            double z_max, Point cyst_center, double cyst_radius,
                            std::uint64_t seed);

}  // namespace usmb::sim
