// SPDX-License-Identifier: Apache-2.0
//
// Image-quality measurements. Region statistics are taken on the linear
// envelope, never on the log-compressed image.
#pragma once

#include <span>
#include <vector>

#include "usmb/core.hpp"

namespace usmb::metrics {

/// Full width at half maximum with linear interpolation between samples.
/// The half level is searched outward from the first sample equal to the
/// maximum, so a flat top counts as one peak.
double fwhm(std::span<const double> profile, double spacing);

/// Axis-aligned rectangle in meters; a pixel belongs to it when its center
/// lies inside, edges included.
struct Region {
  double x0 = 0.0;
  double z0 = 0.0;
  double x1 = 0.0;
  double z1 = 0.0;
};

/// Envelope values of the pixels inside the region. Throws EmptyRegion when
/// no pixel center falls inside.
std::vector<double> region_values(const RealImage& envelope, const ImagingGrid& grid,
                                  const Region& region);

/// 20 log10(mean_a / mean_b).
double contrast_db(const RealImage& envelope, const ImagingGrid& grid, const Region& a,
                   const Region& b);

/// |mu_a - mu_b| / sqrt(var_a + var_b), population variances.
double cnr(const RealImage& envelope, const ImagingGrid& grid, const Region& a, const Region& b);

/// ||est - ref||^2 / ||ref||^2
double nmse(std::span<const double> estimate, std::span<const double> reference);
double nmse(std::span<const cplx> estimate, std::span<const cplx> reference);

/// 10 log10(max|ref|^2 / mean squared error).
double psnr(std::span<const double> estimate, std::span<const double> reference);

}  // namespace usmb::metrics
