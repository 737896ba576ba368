// SPDX-License-Identifier: Apache-2.0
#include "usmb/core.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "usmb/tof.hpp"

namespace usmb {

double distance(Point a, Point b) noexcept { return std::hypot(a.x - b.x, a.z - b.z); }

TransducerArray::TransducerArray(std::vector<Point> element_positions, double center_frequency,
                                 double sampling_frequency)
    : positions_(std::move(element_positions)),
      f0_(center_frequency),
      fs_(sampling_frequency) {
  require(positions_.size() >= 2, ErrorKind::InvalidArgument, "array needs at least 2 elements");
  require(f0_ > 0.0, ErrorKind::InvalidArgument, "center frequency must be positive");
  require(fs_ > 2.0 * f0_, ErrorKind::InvalidArgument,
          "sampling frequency must exceed twice the center frequency");
  for (std::size_t c = 1; c < positions_.size(); ++c) {
    require(positions_[c].x > positions_[c - 1].x, ErrorKind::InvalidArgument,
            "element positions must be strictly increasing laterally");
  }
  pitch_ = (positions_.back().x - positions_.front().x) /
           static_cast<double>(positions_.size() - 1);
}

TransducerArray TransducerArray::linear(std::size_t num_elements, double pitch,
                                        double center_frequency, double sampling_frequency) {
  require(pitch > 0.0, ErrorKind::InvalidArgument, "pitch must be positive");
  require(num_elements >= 2, ErrorKind::InvalidArgument, "array needs at least 2 elements");
  std::vector<Point> pos(num_elements);
  const double half = 0.5 * static_cast<double>(num_elements - 1);
  for (std::size_t c = 0; c < num_elements; ++c) {
    pos[c] = {(static_cast<double>(c) - half) * pitch, 0.0};
  }
  return TransducerArray(std::move(pos), center_frequency, sampling_frequency);
}

TransmitEvent TransmitEvent::plane_wave(double angle) {
  return {PlaneWave{angle}, Point{0.0, 0.0}, 0.0};
}

TransmitEvent TransmitEvent::synthetic_aperture(const TransducerArray& array,
                                                std::size_t element) {
  return {SyntheticAperture{element}, array.position(element), 0.0};
}

TransmitEvent TransmitEvent::focused_line(Point focus) {
  return {FocusedLine{focus}, Point{focus.x, 0.0}, 0.0};
}

void validate_event(const TransmitEvent& event, const TransducerArray& array) {
  require(std::isfinite(event.t0) && event.t0 >= 0.0, ErrorKind::InvalidArgument,
          "transmit t0 must be finite and non-negative");
  if (const auto* pw = std::get_if<PlaneWave>(&event.scheme)) {
    require(std::abs(pw->angle) < std::numbers::pi / 2, ErrorKind::InvalidArgument,
            "plane-wave angle must lie in (-pi/2, pi/2)");
  } else if (const auto* sa = std::get_if<SyntheticAperture>(&event.scheme)) {
    require(sa->element < array.num_elements(), ErrorKind::InvalidArgument,
            "synthetic-aperture element index out of range");
  }
}

void validate(const RfDataCube& cube) {
  require(cube.num_samples >= 1 && cube.num_channels >= 1 && cube.num_events >= 1,
          ErrorKind::DimensionMismatch, "E, C and Nt must all be at least 1");
  require(cube.samples.size() == cube.num_events * cube.num_channels * cube.num_samples,
          ErrorKind::DimensionMismatch,
          "sample count " + std::to_string(cube.samples.size()) + " != E*C*Nt");
  require(cube.events.size() == cube.num_events, ErrorKind::DimensionMismatch,
          "len(events) " + std::to_string(cube.events.size()) + " != E");
  require(cube.speed_of_sound > 0.0 && std::isfinite(cube.speed_of_sound),
          ErrorKind::NonPositiveSpeed, "speed of sound must be positive");
  for (std::size_t i = 0; i < cube.samples.size(); ++i) {
    if (!std::isfinite(cube.samples[i])) {
      fail(ErrorKind::NonFiniteSample, "sample " + std::to_string(i) + " is not finite");
    }
  }
}

ImagingGrid::ImagingGrid(std::vector<double> lateral, std::vector<double> axial)
    : lateral_(std::move(lateral)), axial_(std::move(axial)) {
  require(!lateral_.empty() && !axial_.empty(), ErrorKind::InvalidArgument,
          "grid must be at least 1x1");
  for (std::size_t i = 1; i < lateral_.size(); ++i) {
    require(lateral_[i] > lateral_[i - 1], ErrorKind::InvalidArgument,
            "lateral coordinates must be strictly increasing");
  }
  for (std::size_t i = 0; i < axial_.size(); ++i) {
    require(axial_[i] > 0.0, ErrorKind::InvalidArgument, "axial coordinates must be positive");
    if (i > 0) {
      require(axial_[i] > axial_[i - 1], ErrorKind::InvalidArgument,
              "axial coordinates must be strictly increasing");
    }
  }
}

namespace {
std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = a;
    return v;
  }
  const double step = (b - a) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) v[i] = a + step * static_cast<double>(i);
  return v;
}
}  // namespace

ImagingGrid ImagingGrid::uniform(double x_min, double x_max, std::size_t nx, double z_min,
                                 double z_max, std::size_t nz) {
  return ImagingGrid(linspace(x_min, x_max, nx), linspace(z_min, z_max, nz));
}

FocusedTensor::FocusedTensor(ImagingGrid grid, std::size_t num_channels, std::size_t num_events,
                             bool compounded)
    : grid_(std::move(grid)),
      channels_(num_channels),
      events_(num_events),
      compounded_(compounded),
      values_(num_events * grid_.nx() * grid_.nz() * num_channels) {
  require(num_channels >= 1 && num_events >= 1, ErrorKind::InvalidArgument,
          "focused tensor needs at least one channel and one event");
}

FocusedTensor FocusedTensor::select_event(std::size_t e) const {
  require(e < events_, ErrorKind::ShapeMismatch, "event index out of range");
  FocusedTensor out(grid_, channels_, 1, false);
  const std::size_t block = grid_.nx() * grid_.nz() * channels_;
  std::copy_n(values_.begin() + static_cast<std::ptrdiff_t>(e * block), block,
              out.values_.begin());
  return out;
}

BeamformedImage BeamformedImage::from_rf(ComplexImage rf, ImagingGrid grid) {
  require(rf.nx() == grid.nx() && rf.nz() == grid.nz(), ErrorKind::ShapeMismatch,
          "rf image shape does not match grid");
  RealImage env(rf.nx(), rf.nz());
  for (std::size_t i = 0; i < rf.size(); ++i) env.data()[i] = std::abs(rf.data()[i]);
  return {std::move(rf), std::move(env), std::nullopt, std::move(grid)};
}

void BeamformedImage::compress(double dynamic_range_db) {
  log_db = tof::log_compress(envelope, dynamic_range_db);
}

ScattererField::ScattererField(std::vector<Scatterer> s) : scatterers(std::move(s)) {
  for (const auto& sc : scatterers) {
    require(sc.z > 0.0, ErrorKind::InvalidArgument, "scatterer depth must be positive");
    require(std::isfinite(sc.amplitude) && std::isfinite(sc.x), ErrorKind::InvalidArgument,
            "scatterer coordinates and amplitude must be finite");
  }
}

ScattererField ScattererField::merged(const ScattererField& other) const {
  std::vector<Scatterer> all = scatterers;
  all.insert(all.end(), other.scatterers.begin(), other.scatterers.end());
  return ScattererField(std::move(all));
}

ApodizationWindow ApodizationWindow::make(ApodizationKind kind, std::size_t num_channels) {
  require(num_channels >= 2, ErrorKind::InvalidArgument, "apodization needs C >= 2");
  require(kind != ApodizationKind::Hanning || num_channels >= 3, ErrorKind::InvalidArgument,
          "a 2-element Hanning window is identically zero");
  std::vector<double> w(num_channels, 1.0);
  if (kind != ApodizationKind::Rectangular) {
    const double a0 = kind == ApodizationKind::Hanning ? 0.5 : 0.54;
    const double a1 = 1.0 - a0;
    const double denom = static_cast<double>(num_channels - 1);
    for (std::size_t c = 0; c < num_channels; ++c) {
      w[c] = a0 - a1 * std::cos(2.0 * std::numbers::pi * static_cast<double>(c) / denom);
    }
    // Mirror the lower half so the symmetry is exact in floating point, then
    // peak-normalize (even C never samples the window's maximum).
    for (std::size_t c = 0; c < num_channels / 2; ++c) w[num_channels - 1 - c] = w[c];
    double peak = 0.0;
    for (double v : w) peak = std::max(peak, v);
    for (double& v : w) v /= peak;
  }
  return {kind, std::move(w)};
}

}  // namespace usmb
