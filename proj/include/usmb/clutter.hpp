// SPDX-License-Identifier: Apache-2.0
//
// Spatio-temporal clutter filtering on the Casorati matrix Y (space x time):
// singular value thresholding and the low-rank plus row-sparse split
// Y = X_tissue + X_blood.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "usmb/image.hpp"
#include "usmb/numerics.hpp"

namespace usmb::clutter {

/// Row index of pixel (ix, iz) is ix + iz * nx, i.e. column-major
/// vectorization of a frame whose rows are lateral positions.
struct CasoratiMatrix {
  numerics::CMatrix data;  // (nx * nz) x T
  std::size_t nx = 0;
  std::size_t nz = 0;

  std::size_t frames() const noexcept { return data.cols(); }
};

CasoratiMatrix build_casorati(std::span<const ComplexImage> frames);
std::vector<ComplexImage> unbuild_casorati(const CasoratiMatrix& y);

/// U diag((s - lambda)_+) V^H.
numerics::CMatrix svt(const numerics::CMatrix& y, double lambda);

/// Group soft threshold with one group per row (the time series of a pixel).
numerics::CMatrix mixed_l12_threshold(const numerics::CMatrix& x, double lambda);

double nuclear_norm(const numerics::CMatrix& x);
double l12_norm(const numerics::CMatrix& x);

struct RpcaOptions {
  double lambda1 = 0.0;  // 0 selects s1(Y) / sqrt(max(NM, T))
  double lambda2 = 0.0;  // 0 selects lambda1 / 2
  double mu1 = 0.5;
  double mu2 = 0.5;
  int max_iters = 500;
  double tol = 1e-6;
};

struct RpcaResult {
  numerics::CMatrix tissue;
  numerics::CMatrix blood;
  int iterations = 0;
  bool converged = false;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  std::vector<double> objective;  // after each iteration; front() is the start
};

/// Default lambda1 for a given Y.
double default_lambda1(const numerics::CMatrix& y);

/// Proximal gradient from X_t = X_b = 0:
///   X_t <- SVT_{mu1 l1}(X_t + mu1 (Y - X_t - X_b))
///   X_b <- T12_{mu2 l2}(X_b + mu2 (Y - X_t - X_b))
/// both from the previous iterate. Stops when both relative changes fall
/// below tol. Throws StepTooLarge if the objective
///   0.5 ||Y - X_t - X_b||_F^2 + l1 ||X_t||_* + l2 ||X_b||_{1,2}
/// increases.
RpcaResult rpca(const numerics::CMatrix& y, const RpcaOptions& options = {});

/// Per-pixel temporal l2 norm of a Casorati-shaped matrix, as an nx x nz image.
RealImage power_doppler(const numerics::CMatrix& blood, std::size_t nx, std::size_t nz);

}  // namespace usmb::clutter
