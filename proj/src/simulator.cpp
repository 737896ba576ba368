// SPDX-License-Identifier: Apache-2.0
#include "usmb/simulator.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "usmb/random.hpp"

namespace usmb::sim {

namespace {
// Gaussian tails beyond this many sigmas are below 1e-14 of the peak.
constexpr double kSupportSigmas = 8.0;
}  // namespace

double PulseModel::envelope_sigma() const {
  return std::sqrt(2.0 * std::log(2.0)) / (std::numbers::pi * center_frequency * fractional_bandwidth);
}

double gaussian_pulse(const PulseModel& pulse, double t) {
  const double s = pulse.envelope_sigma();
  return pulse.amplitude * std::exp(-t * t / (2.0 * s * s)) *
         std::cos(2.0 * std::numbers::pi * pulse.center_frequency * t);
}

double two_way_delay(const TransmitEvent& event, Point element, Point target, double speed) {
  double transmit = 0.0;
  if (const auto* pw = std::get_if<PlaneWave>(&event.scheme)) {
    transmit = target.x * std::sin(pw->angle) + target.z * std::cos(pw->angle);
  } else {
    transmit = distance(event.origin, target);
  }
  return event.t0 + (transmit + distance(element, target)) / speed;
}

namespace {

void check_inputs(const TransducerArray& array, std::span<const TransmitEvent> events,
                  const PulseModel& pulse, double speed) {
  require(!events.empty(), ErrorKind::EmptyEvents, "at least one transmit event is required");
  require(speed > 0.0, ErrorKind::NonPositiveSpeed, "speed of sound must be positive");
  require(pulse.center_frequency > 0.0, ErrorKind::InvalidArgument,
          "pulse center frequency must be positive");
  require(pulse.fractional_bandwidth > 0.0 && pulse.fractional_bandwidth < 2.0,
          ErrorKind::InvalidArgument, "fractional bandwidth must lie in (0, 2)");
  for (const auto& ev : events) validate_event(ev, array);
}

double max_delay(const TransducerArray& array, std::span<const TransmitEvent> events,
                 const ScattererField& field, double speed) {
  double worst = 0.0;
  for (const auto& ev : events) {
    for (const auto& el : array.positions()) {
      for (const auto& s : field.scatterers) {
        worst = std::max(worst, two_way_delay(ev, el, {s.x, s.z}, speed));
      }
    }
  }
  return worst;
}

}  // namespace

std::size_t required_samples(const TransducerArray& array, std::span<const TransmitEvent> events,
                             const ScattererField& field, const PulseModel& pulse, double speed) {
  check_inputs(array, events, pulse, speed);
  const double tmax = max_delay(array, events, field, speed) + kSupportSigmas * pulse.envelope_sigma();
  return static_cast<std::size_t>(std::ceil(tmax * array.sampling_frequency())) + 1;
}

RfDataCube simulate(const TransducerArray& array, std::span<const TransmitEvent> events,
                    const ScattererField& field, const PulseModel& pulse,
                    const SimulationParams& params) {
  check_inputs(array, events, pulse, params.speed_of_sound);
  require(params.num_samples >= 1, ErrorKind::InvalidArgument, "Nt must be at least 1");
  require(params.noise_std >= 0.0, ErrorKind::InvalidArgument, "noise_std must be non-negative");

  const double fs = array.sampling_frequency();
  const double window = static_cast<double>(params.num_samples - 1) / fs;
  const double deepest = max_delay(array, events, field, params.speed_of_sound);
  if (deepest > window) {
    fail(ErrorKind::DepthExceedsWindow, "two-way delay " + std::to_string(deepest) +
                                            " s exceeds the recording window " +
                                            std::to_string(window) + " s");
  }

  RfDataCube cube;
  cube.num_events = events.size();
  cube.num_channels = array.num_elements();
  cube.num_samples = params.num_samples;
  cube.samples.assign(cube.num_events * cube.num_channels * cube.num_samples, 0.0);
  cube.fs = fs;
  cube.speed_of_sound = params.speed_of_sound;
  cube.center_frequency = array.center_frequency();
  cube.events.assign(events.begin(), events.end());

  const double support = kSupportSigmas * pulse.envelope_sigma();
  const auto num_traces = static_cast<std::ptrdiff_t>(cube.num_events * cube.num_channels);

#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t trace = 0; trace < num_traces; ++trace) {
    const auto e = static_cast<std::size_t>(trace) / cube.num_channels;
    const auto c = static_cast<std::size_t>(trace) % cube.num_channels;
    auto out = cube.trace(e, c);
    const Point element = array.position(c);
    for (const auto& s : field.scatterers) {
      const double tau = two_way_delay(events[e], element, {s.x, s.z}, params.speed_of_sound);
      const auto first = static_cast<std::ptrdiff_t>(std::max(0.0, std::ceil((tau - support) * fs)));
      const auto last = std::min(static_cast<std::ptrdiff_t>(params.num_samples) - 1,
                                 static_cast<std::ptrdiff_t>(std::floor((tau + support) * fs)));
      for (std::ptrdiff_t t = first; t <= last; ++t) {
        out[static_cast<std::size_t>(t)] +=
            s.amplitude * gaussian_pulse(pulse, static_cast<double>(t) / fs - tau);
      }
    }
    if (params.noise_std > 0.0) {
      const CounterRng rng(params.seed, static_cast<std::uint64_t>(trace));
      for (std::size_t t = 0; t < out.size(); ++t) out[t] += params.noise_std * rng.normal(t);
    }
  }
  return cube;
}

ScattererField cyst_phantom(std::size_t num_scatterers, double x_min, double x_max, double z_min,
                            double z_max, Point cyst_center, double cyst_radius,
                            std::uint64_t seed) {
  require(x_max > x_min && z_max > z_min && z_min > 0.0, ErrorKind::InvalidArgument,
          "phantom extent must be a non-empty rectangle in front of the array");
  RngStream rng(seed, 0xC157);
  std::vector<Scatterer> out;
  out.reserve(num_scatterers);
  while (out.size() < num_scatterers) {
    const double x = rng.uniform(x_min, x_max);
    const double z = rng.uniform(z_min, z_max);
    const double amp = rng.normal();
    if (distance({x, z}, cyst_center) <= cyst_radius) continue;
    out.push_back({x, z, amp});
  }
  return ScattererField(std::move(out));
}

}  // namespace usmb::sim
