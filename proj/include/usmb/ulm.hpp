// SPDX-License-Identifier: Apache-2.0
//
// Localization microscopy on simulated microbubble frames. Positions are in
// high-resolution (HR) pixel units: x along the lateral index, z along the
// axial index, pixel centers at integers.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "usmb/image.hpp"
#include "usmb/numerics.hpp"
#include "usmb/sparse.hpp"

namespace usmb::ulm {

struct HrPoint {
  double x = 0.0;
  double z = 0.0;
};

struct BubbleFrame {
  RealImage image;  // low-resolution frame
  std::vector<HrPoint> truth;
};

struct BubbleSimConfig {
  std::size_t hr_nx = 128;
  std::size_t hr_nz = 128;
  std::size_t frames = 50;
  double mean_bubbles = 10.0;
  double psf_sigma = 2.0;  // HR pixels
  std::size_t factor = 4;
  double snr_db = 30.0;    // noise std 10^(-snr/20) relative to a unit HR peak
  std::uint64_t seed = 0;
};

/// Frame t draws from the counter stream (seed, t): Poisson count, uniform
/// positions over [0, n-1], unit-amplitude Gaussian spots, block averaging,
/// then white Gaussian noise.
std::vector<BubbleFrame> simulate_bubbles(const BubbleSimConfig& cfg);

/// Noise-free HR rendering of unit bubbles at the given positions.
RealImage render_bubbles(std::span<const HrPoint> points, std::size_t nx, std::size_t nz,
                         double sigma);

/// Unit-peak Gaussian kernel of size 2 * ceil(4 sigma) + 1.
RealImage gaussian_psf(double sigma);

/// factor x factor block mean; dimensions must be divisible by factor.
RealImage block_average(const RealImage& hr, std::size_t factor);
/// Adjoint of block_average: each LR value spread over its block divided by factor^2.
RealImage block_spread(const RealImage& lr, std::size_t factor);

/// x -> block_average(psf * x) on an HR grid of nx x nz.
numerics::LinearOperator localization_operator(std::size_t hr_nx, std::size_t hr_nz,
                                               const RealImage& psf, std::size_t factor);

/// ISTA on the operator above; negative entries are clamped to zero afterwards.
RealImage localize_sparse(const RealImage& frame, const RealImage& psf, double lambda,
                          std::size_t factor, const sparse::SolverSettings& settings = {});

struct Detection {
  double x = 0.0;
  double z = 0.0;
  double intensity = 0.0;
};

/// Local maxima (3x3) above threshold_fraction * max(frame), strongest first;
/// a maximum within window_radius of an already kept one is dropped (ties:
/// smaller x index, then z). Each survivor is refined to the intensity
/// weighted centroid of its (2r+1)^2 window; intensity is the peak value.
std::vector<Detection> detect_centroids(const RealImage& frame, double threshold_fraction,
                                        std::size_t window_radius);

/// 8-connected components of the nonzero support, one centroid per component
/// (intensity = component sum).
std::vector<Detection> support_clusters(const RealImage& sparse_image);

/// Maps low-resolution pixel coordinates to HR coordinates: (i + 0.5) f - 0.5.
Detection lr_to_hr(const Detection& d, std::size_t factor);

struct LocalizationSet {
  std::vector<Detection> detections;
};

/// Histogram of detections on the HR grid, positions rounded to the nearest
/// pixel and clamped to the grid.
RealImage accumulate(std::span<const LocalizationSet> sets, std::size_t hr_nx, std::size_t hr_nz);

struct Score {
  double precision = 1.0;
  double recall = 1.0;
  double mean_error = 0.0;
  std::size_t matched = 0;
};

/// Greedy one-to-one matching in ascending distance within match_radius.
/// No detections gives precision 1; no truth gives recall 1.
Score score(std::span<const Detection> detections, std::span<const HrPoint> truth,
            double match_radius);

}  // namespace usmb::ulm
