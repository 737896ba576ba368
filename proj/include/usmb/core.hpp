// SPDX-License-Identifier: Apache-2.0
//
// Shared domain types. Coordinates are 2-D (lateral x, axial z) in meters with
// the origin at the lateral center of the array face; z grows into the medium.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "usmb/error.hpp"
#include "usmb/image.hpp"

namespace usmb {

struct Point {
  double x = 0.0;  // lateral
  double z = 0.0;  // axial

  bool operator==(const Point&) const = default;
};

double distance(Point a, Point b) noexcept;

/// Linear array. Immutable once constructed; the constructor enforces the
/// invariants (C >= 2, fs > 2 f0, strictly increasing lateral positions).
class TransducerArray {
 public:
  TransducerArray(std::vector<Point> element_positions, double center_frequency,
                  double sampling_frequency);

  /// C elements at the given pitch, centered laterally on x = 0, at z = 0.
  static TransducerArray linear(std::size_t num_elements, double pitch, double center_frequency,
                                double sampling_frequency);

  std::size_t num_elements() const noexcept { return positions_.size(); }
  std::span<const Point> positions() const noexcept { return positions_; }
  Point position(std::size_t c) const { return positions_.at(c); }
  double pitch() const noexcept { return pitch_; }
  double center_frequency() const noexcept { return f0_; }
  double sampling_frequency() const noexcept { return fs_; }

 private:
  std::vector<Point> positions_;
  double pitch_ = 0.0;
  double f0_ = 0.0;
  double fs_ = 0.0;
};

struct PlaneWave {
  double angle = 0.0;  // radians, in (-pi/2, pi/2)
};
struct SyntheticAperture {
  std::size_t element = 0;
};
struct FocusedLine {
  Point focus;
};
using TransmitScheme = std::variant<PlaneWave, SyntheticAperture, FocusedLine>;

struct TransmitEvent {
  TransmitScheme scheme;
  Point origin;     // r_e
  double t0 = 0.0;  // emission reference time added to every delay, >= 0

  static TransmitEvent plane_wave(double angle);
  static TransmitEvent synthetic_aperture(const TransducerArray& array, std::size_t element);
  /// Origin at the lateral position of the focus on the array face.
  static TransmitEvent focused_line(Point focus);
};

/// Throws InvalidArgument when the event is inconsistent with the array.
void validate_event(const TransmitEvent& event, const TransducerArray& array);

/// Raw channel recordings, E x C x Nt, event-major, channel-next, time-minor.
struct RfDataCube {
  std::size_t num_events = 0;
  std::size_t num_channels = 0;
  std::size_t num_samples = 0;
  std::vector<double> samples;
  double fs = 0.0;
  double speed_of_sound = 0.0;
  double center_frequency = 0.0;
  std::vector<TransmitEvent> events;

  std::size_t index(std::size_t e, std::size_t c, std::size_t t) const noexcept {
    return (e * num_channels + c) * num_samples + t;
  }
  double at(std::size_t e, std::size_t c, std::size_t t) const { return samples[index(e, c, t)]; }
  std::span<const double> trace(std::size_t e, std::size_t c) const {
    return {samples.data() + index(e, c, 0), num_samples};
  }
  std::span<double> trace(std::size_t e, std::size_t c) {
    return {samples.data() + index(e, c, 0), num_samples};
  }
};

/// Returns normally iff every RfDataCube invariant holds. Pure.
void validate(const RfDataCube& cube);

class ImagingGrid {
 public:
  ImagingGrid(std::vector<double> lateral, std::vector<double> axial);
  static ImagingGrid uniform(double x_min, double x_max, std::size_t nx, double z_min, double z_max,
                             std::size_t nz);

  std::size_t nx() const noexcept { return lateral_.size(); }
  std::size_t nz() const noexcept { return axial_.size(); }
  std::span<const double> lateral() const noexcept { return lateral_; }
  std::span<const double> axial() const noexcept { return axial_; }
  Point pixel(std::size_t ix, std::size_t iz) const { return {lateral_[ix], axial_[iz]}; }

  bool operator==(const ImagingGrid&) const = default;

 private:
  std::vector<double> lateral_;
  std::vector<double> axial_;
};

/// TOF-corrected channel vectors y_r. Layout [event][ix][iz][channel] so that
/// every per-pixel channel vector is contiguous.
class FocusedTensor {
 public:
  FocusedTensor(ImagingGrid grid, std::size_t num_channels, std::size_t num_events,
                bool compounded);

  const ImagingGrid& grid() const noexcept { return grid_; }
  std::size_t num_channels() const noexcept { return channels_; }
  std::size_t num_events() const noexcept { return events_; }
  bool compounded() const noexcept { return compounded_; }

  std::span<cplx> channels(std::size_t e, std::size_t ix, std::size_t iz) {
    return {values_.data() + offset(e, ix, iz), channels_};
  }
  std::span<const cplx> channels(std::size_t e, std::size_t ix, std::size_t iz) const {
    return {values_.data() + offset(e, ix, iz), channels_};
  }
  /// Single-event view used by the beamformers.
  std::span<const cplx> channels(std::size_t ix, std::size_t iz) const {
    return channels(0, ix, iz);
  }

  FocusedTensor select_event(std::size_t e) const;

  std::vector<cplx>& values() noexcept { return values_; }
  const std::vector<cplx>& values() const noexcept { return values_; }

 private:
  std::size_t offset(std::size_t e, std::size_t ix, std::size_t iz) const noexcept {
    return ((e * grid_.nx() + ix) * grid_.nz() + iz) * channels_;
  }

  ImagingGrid grid_;
  std::size_t channels_;
  std::size_t events_;
  bool compounded_;
  std::vector<cplx> values_;
};

/// Per-pixel reflectivity estimates with envelope (|rf|) and optional dB view.
struct BeamformedImage {
  ComplexImage rf;
  RealImage envelope;
  std::optional<RealImage> log_db;
  ImagingGrid grid;

  /// Fills envelope = |rf|; log_db stays empty.
  static BeamformedImage from_rf(ComplexImage rf, ImagingGrid grid);
  /// Adds the log-compressed view (see tof::log_compress).
  void compress(double dynamic_range_db);
};

struct Scatterer {
  double x = 0.0;
  double z = 0.0;
  double amplitude = 0.0;
};

struct ScattererField {
  std::vector<Scatterer> scatterers;

  ScattererField() = default;
  explicit ScattererField(std::vector<Scatterer> s);
  ScattererField merged(const ScattererField& other) const;
};

enum class ApodizationKind { Rectangular, Hanning, Hamming };

/// Receive apodization weights; deterministic in (kind, C) and peak-normalized.
struct ApodizationWindow {
  ApodizationKind kind = ApodizationKind::Rectangular;
  std::vector<double> weights;

  static ApodizationWindow make(ApodizationKind kind, std::size_t num_channels);
};

}  // namespace usmb
