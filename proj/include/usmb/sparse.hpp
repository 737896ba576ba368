// SPDX-License-Identifier: Apache-2.0
//
// l1-regularized least squares by ISTA, plus the two measurement models built
// on it: a partial-DFT scanline model and 2-D image deconvolution.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "usmb/image.hpp"
#include "usmb/numerics.hpp"

namespace usmb::sparse {

/// x * max(1 - lambda / |x|, 0) per entry.
std::vector<cplx> soft_threshold(std::span<const cplx> x, double lambda);

/// 0.5 ||y - A x||^2 + lambda ||x||_1
double lasso_objective(const numerics::LinearOperator& op, std::span<const cplx> y,
                       std::span<const cplx> x, double lambda);

struct SparseProblem {
  numerics::LinearOperator op;
  std::vector<cplx> y;
  double lambda = 0.0;
  double step = 0.0;  // 0 selects 1 / (1.01 ||A||^2) from power iteration
  int max_iters = 5000;
  double tol = 1e-8;
  int power_iters = 200;
  std::uint64_t seed = 0x5eed;
};

struct IstaResult {
  std::vector<cplx> x;
  int iterations = 0;
  double objective = 0.0;
  double step = 0.0;
  std::vector<double> history;  // objective after each iterate
};

/// x <- soft_threshold(x - mu A^H (A x - y), mu lambda) from x = 0, until
/// ||dx|| / max(||x||, 1) < tol. Throws StepTooLarge if the objective rises.
IstaResult ista(const SparseProblem& problem);

/// y = H .* (selected bins of the unnormalized N-point DFT of a real x).
struct ScanlineModel {
  std::size_t length = 0;            // N
  std::vector<std::size_t> bins;     // M distinct indices in [0, N)
  std::vector<cplx> pulse_spectrum;  // H, one entry per bin

  void validate() const;
};

/// Real-domain operator; the adjoint is the zero-filled inverse DFT weighted by conj(H).
numerics::LinearOperator scanline_operator(const ScanlineModel& model);

struct SolverSettings {
  int max_iters = 5000;
  double tol = 1e-8;
};

std::vector<double> recover_scanline(const ScanlineModel& model, std::span<const cplx> y_tilde,
                                     double lambda, const SolverSettings& settings = {});

/// Zero-padded "same"-size convolution with an odd-sized kernel centered on
/// its middle sample, and its adjoint (correlation).
RealImage convolve_same(const RealImage& x, const RealImage& kernel);
RealImage correlate_same(const RealImage& y, const RealImage& kernel);

numerics::LinearOperator blur_operator(std::size_t nx, std::size_t nz, const RealImage& psf);

RealImage deconvolve(const RealImage& y, const RealImage& psf, double lambda,
                     const SolverSettings& settings = {});

}  // namespace usmb::sparse
