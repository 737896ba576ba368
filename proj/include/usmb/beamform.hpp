// SPDX-License-Identifier: Apache-2.0
//
// Per-pixel beamformers over TOF-corrected channel vectors y_r:
//   DAS         x = (1/C) w^H y
//   MV/Capon    w = G^-1 1 / (1^H G^-1 1), G from subaperture/axial averaging
//   Wiener      MV followed by the post-filter s^2 / (s^2 + w^H G w)
//   CF          |1^H y|^2 / (C y^H y), applied as a post-filter on DAS
//   iMAP        alternating variance estimates and MAP shrinkage of 1^H y
// All operate on single-event tensors; pixels whose channel vector is all
// zero produce 0.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "usmb/core.hpp"
#include "usmb/numerics.hpp"

namespace usmb::bf {

struct CovarianceConfig {
  std::size_t subaperture_length = 0;  // L; 0 selects floor(C / 2)
  std::size_t axial_half_window = 2;   // K
  double loading = 0.01;               // epsilon, relative to trace / L

  std::size_t resolved_length(std::size_t num_channels) const;
};

enum class CovarianceModel {
  Sample,    // estimated from the data
  Identity,  // forced to I; reduces MV to (subaperture-averaged) DAS
};

BeamformedImage das(const FocusedTensor& focused, const ApodizationWindow& apod);

/// Mean of y_sub y_sub^H over the C-L+1 sliding subapertures of every vector
/// in `neighborhood` (the 2K+1 axial neighbors), then loading * trace / L
/// added to the diagonal.
numerics::CMatrix estimate_covariance(std::span<const std::span<const cplx>> neighborhood,
                                      const CovarianceConfig& cfg);

/// Covariance for pixel (ix, iz) with axial neighbor indices clamped to the grid.
numerics::CMatrix pixel_covariance(const FocusedTensor& focused, std::size_t ix, std::size_t iz,
                                   const CovarianceConfig& cfg);

/// Unity-gain MV weights G^-1 1 / (1^H G^-1 1).
std::vector<cplx> mv_weights(const numerics::CMatrix& covariance);

BeamformedImage mv(const FocusedTensor& focused, const CovarianceConfig& cfg,
                   CovarianceModel model = CovarianceModel::Sample);

/// CF per pixel; 0 where y_r = 0.
RealImage coherence_factor(const FocusedTensor& focused);

BeamformedImage cf_weighted_das(const FocusedTensor& focused, const ApodizationWindow& apod);

/// Per-pixel iMAP on a single channel vector.
cplx imap_pixel(std::span<const cplx> y, int iterations);

BeamformedImage imap(const FocusedTensor& focused, int iterations = 2);

/// Wiener post-filter gain s2 / (s2 + noise_output_power); 0 when both vanish.
double wiener_gain(double signal_power, double noise_output_power);

/// DAS with the Wiener post-filter for white noise, variances plugged in from
/// the data: s2 = |x_das|^2, G = s_n^2 I with s_n^2 = (1/C)||y - 1 x_das||^2.
BeamformedImage wiener_das(const FocusedTensor& focused);

/// MV weights followed by the Wiener post-filter with s2 = |x_mv|^2 and the
/// same covariance estimate used for the weights.
BeamformedImage wiener(const FocusedTensor& focused, const CovarianceConfig& cfg);

enum class CompoundMode { Mean, MV };

/// Combines per-transmit images. MV mode forms an E x E transmit covariance
/// from the (2K+1)^2 spatial neighborhood and applies unity-gain MV weights.
BeamformedImage compound(std::span<const BeamformedImage> images, CompoundMode mode,
                         const CovarianceConfig& cfg = {},
                         CovarianceModel model = CovarianceModel::Sample);

}  // namespace usmb::bf
