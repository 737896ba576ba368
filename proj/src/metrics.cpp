// SPDX-License-Identifier: Apache-2.0
#include "usmb/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace usmb::metrics {

double fwhm(std::span<const double> profile, double spacing) {
  require(spacing > 0.0, ErrorKind::InvalidArgument, "spacing must be positive");
  require(!profile.empty(), ErrorKind::NoPeak, "empty profile");
  const auto top = std::max_element(profile.begin(), profile.end());
  const double peak = *top;
  require(std::isfinite(peak) && peak > 0.0, ErrorKind::NoPeak,
          "profile has no positive maximum");
  const double half = 0.5 * peak;
  const auto n = static_cast<std::ptrdiff_t>(profile.size());
  const auto ip = static_cast<std::ptrdiff_t>(top - profile.begin());

  std::ptrdiff_t i = ip;
  while (i > 0 && profile[static_cast<std::size_t>(i - 1)] >= half) --i;
  require(i > 0, ErrorKind::HalfLevelNotCrossed, "profile does not fall to half maximum on the left");
  const double a0 = profile[static_cast<std::size_t>(i - 1)];
  const double a1 = profile[static_cast<std::size_t>(i)];
  const double left = static_cast<double>(i - 1) + (half - a0) / (a1 - a0);

  std::ptrdiff_t j = ip;
  while (j + 1 < n && profile[static_cast<std::size_t>(j + 1)] >= half) ++j;
  require(j + 1 < n, ErrorKind::HalfLevelNotCrossed,
          "profile does not fall to half maximum on the right");
  const double b0 = profile[static_cast<std::size_t>(j)];
  const double b1 = profile[static_cast<std::size_t>(j + 1)];
  const double right = static_cast<double>(j) + (b0 - half) / (b0 - b1);

  return (right - left) * spacing;
}

std::vector<double> region_values(const RealImage& envelope, const ImagingGrid& grid,
                                  const Region& region) {
  require(envelope.nx() == grid.nx() && envelope.nz() == grid.nz(), ErrorKind::GridMismatch,
          "envelope does not match the grid");
  std::vector<double> out;
  for (std::size_t ix = 0; ix < grid.nx(); ++ix) {
    const double x = grid.lateral()[ix];
    if (x < region.x0 || x > region.x1) continue;
    for (std::size_t iz = 0; iz < grid.nz(); ++iz) {
      const double z = grid.axial()[iz];
      if (z < region.z0 || z > region.z1) continue;
      out.push_back(envelope(ix, iz));
    }
  }
  require(!out.empty(), ErrorKind::EmptyRegion, "region contains no pixel centers");
  return out;
}

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

Moments moments(std::span<const double> v) {
  Moments m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  for (double x : v) m.var += (x - m.mean) * (x - m.mean);
  m.var /= static_cast<double>(v.size());
  return m;
}

}  // namespace

double contrast_db(const RealImage& envelope, const ImagingGrid& grid, const Region& a,
                   const Region& b) {
  const auto ma = moments(region_values(envelope, grid, a));
  const auto mb = moments(region_values(envelope, grid, b));
  require(mb.mean != 0.0, ErrorKind::ZeroMeanB, "mean of the reference region is zero");
  return 20.0 * std::log10(ma.mean / mb.mean);
}

double cnr(const RealImage& envelope, const ImagingGrid& grid, const Region& a, const Region& b) {
  const auto ma = moments(region_values(envelope, grid, a));
  const auto mb = moments(region_values(envelope, grid, b));
  const double var = ma.var + mb.var;
  require(var > 0.0, ErrorKind::ZeroVarianceBoth, "both regions have zero variance");
  return std::abs(ma.mean - mb.mean) / std::sqrt(var);
}

namespace {

template <typename T>
double nmse_impl(std::span<const T> est, std::span<const T> ref) {
  require(est.size() == ref.size(), ErrorKind::ShapeMismatch, "nmse inputs differ in length");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    num += std::norm(est[i] - ref[i]);
    den += std::norm(ref[i]);
  }
  require(den > 0.0, ErrorKind::ZeroReference, "reference has zero norm");
  return num / den;
}

}  // namespace

double nmse(std::span<const double> estimate, std::span<const double> reference) {
  return nmse_impl(estimate, reference);
}

double nmse(std::span<const cplx> estimate, std::span<const cplx> reference) {
  return nmse_impl(estimate, reference);
}

double psnr(std::span<const double> estimate, std::span<const double> reference) {
  require(estimate.size() == reference.size() && !reference.empty(), ErrorKind::ShapeMismatch,
          "psnr inputs differ in length");
  double peak = 0.0, mse = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    peak = std::max(peak, std::abs(reference[i]));
    mse += (estimate[i] - reference[i]) * (estimate[i] - reference[i]);
  }
  require(peak > 0.0, ErrorKind::ZeroReference, "reference is all zero");
  mse /= static_cast<double>(reference.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

}  // namespace usmb::metrics
