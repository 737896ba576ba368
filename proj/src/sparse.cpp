// SPDX-License-Identifier: Apache-2.0
#include "usmb/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "usmb/error.hpp"

namespace usmb::sparse {

using numerics::LinearOperator;

std::vector<cplx> soft_threshold(std::span<const cplx> x, double lambda) {
  require(lambda >= 0.0, ErrorKind::InvalidArgument, "threshold must be non-negative");
  std::vector<cplx> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double mag = std::abs(x[i]);
    out[i] = mag > lambda ? x[i] * (1.0 - lambda / mag) : cplx{};
  }
  return out;
}

namespace {

double l1(std::span<const cplx> x) {
  double s = 0.0;
  for (const auto& v : x) s += std::abs(v);
  return s;
}

double half_residual(std::span<const cplx> ax, std::span<const cplx> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += std::norm(ax[i] - y[i]);
  return 0.5 * s;
}

}  // namespace

double lasso_objective(const LinearOperator& op, std::span<const cplx> y, std::span<const cplx> x,
                       double lambda) {
  const auto ax = op.apply(x);
  return half_residual(ax, y) + lambda * l1(x);
}

IstaResult ista(const SparseProblem& p) {
  require(p.lambda > 0.0, ErrorKind::InvalidArgument, "lambda must be positive");
  require(p.y.size() == p.op.rows, ErrorKind::DimensionMismatch,
          "measurement length does not match the operator");
  require(p.max_iters >= 1 && p.tol > 0.0, ErrorKind::InvalidArgument,
          "max_iters must be >= 1 and tol positive");
  for (const auto& v : p.y) {
    require(std::isfinite(v.real()) && std::isfinite(v.imag()), ErrorKind::NonFiniteSample,
            "measurement contains a non-finite value");
  }
  numerics::check_adjoint(p.op, p.seed);

  IstaResult res;
  // x = 0 already satisfies the optimality conditions.
  const auto g0 = p.op.apply_adjoint(p.y);
  if (std::all_of(g0.begin(), g0.end(), [&](cplx v) { return std::abs(v) <= p.lambda; })) {
    res.x.assign(p.op.cols, cplx{});
    res.objective = half_residual(std::vector<cplx>(p.op.rows), p.y);
    return res;
  }
  if (p.step > 0.0) {
    res.step = p.step;
  } else {
    const double s = numerics::spectral_norm_estimate(p.op, p.power_iters, p.seed);
    res.step = s > 0.0 ? 1.0 / (1.01 * s * s) : 1.0;
  }
  const double mu = res.step;

  std::vector<cplx> x(p.op.cols);
  std::vector<cplx> ax(p.op.rows);
  std::vector<cplx> r(p.op.rows);
  double obj = half_residual(ax, p.y);
  for (int k = 1; k <= p.max_iters; ++k) {
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = ax[i] - p.y[i];
    auto z = p.op.apply_adjoint(r);
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] - mu * z[i];
    auto next = soft_threshold(z, mu * p.lambda);

    double change = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) change += std::norm(next[i] - x[i]);
    change = std::sqrt(change) / std::max(numerics::norm2(x), 1.0);

    ax = p.op.apply(next);
    const double next_obj = half_residual(ax, p.y) + p.lambda * l1(next);
    if (next_obj > obj + 1e-12 * std::max(std::abs(obj), 1e-300)) {
      fail(ErrorKind::StepTooLarge, "objective increased at iteration " + std::to_string(k) +
                                        " (" + std::to_string(obj) + " -> " +
                                        std::to_string(next_obj) + ")");
    }
    obj = next_obj;
    x = std::move(next);
    res.history.push_back(obj);
    res.iterations = k;
    if (change < p.tol) break;
  }
  res.x = std::move(x);
  res.objective = obj;
  return res;
}

void ScanlineModel::validate() const {
  require(length >= 1, ErrorKind::InvalidArgument, "scanline length must be positive");
  require(!bins.empty() && bins.size() <= length, ErrorKind::InvalidArgument,
          "need 1 <= M <= N retained bins");
  require(pulse_spectrum.size() == bins.size(), ErrorKind::DimensionMismatch,
          "pulse spectrum length must equal the bin count");
  std::vector<bool> seen(length, false);
  for (auto b : bins) {
    require(b < length, ErrorKind::InvalidArgument, "bin index out of range");
    require(!seen[b], ErrorKind::InvalidArgument, "bin indices must be unique");
    seen[b] = true;
  }
  for (const auto& h : pulse_spectrum) {
    require(std::isfinite(h.real()) && std::isfinite(h.imag()), ErrorKind::NonFiniteSample,
            "pulse spectrum contains a non-finite value");
  }
}

LinearOperator scanline_operator(const ScanlineModel& model) {
  model.validate();
  LinearOperator op;
  op.rows = model.bins.size();
  op.cols = model.length;
  op.real_domain = true;
  op.forward = [model](std::span<const cplx> x, std::span<cplx> y) {
    const auto spec = numerics::fft(x);
    for (std::size_t m = 0; m < model.bins.size(); ++m) {
      y[m] = model.pulse_spectrum[m] * spec[model.bins[m]];
    }
  };
  op.adjoint = [model](std::span<const cplx> y, std::span<cplx> x) {
    std::vector<cplx> full(model.length);
    for (std::size_t m = 0; m < model.bins.size(); ++m) {
      full[model.bins[m]] = std::conj(model.pulse_spectrum[m]) * y[m];
    }
    const auto back = numerics::fft(full, true);
    const double n = static_cast<double>(model.length);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = n * back[i];
  };
  return op;
}

std::vector<double> recover_scanline(const ScanlineModel& model, std::span<const cplx> y_tilde,
                                     double lambda, const SolverSettings& settings) {
  SparseProblem p;
  p.op = scanline_operator(model);
  p.y.assign(y_tilde.begin(), y_tilde.end());
  p.lambda = lambda;
  p.max_iters = settings.max_iters;
  p.tol = settings.tol;
  const auto res = ista(p);
  std::vector<double> out(res.x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = res.x[i].real();
  return out;
}

namespace {

void require_odd_kernel(const RealImage& kernel) {
  require(kernel.nx() % 2 == 1 && kernel.nz() % 2 == 1, ErrorKind::InvalidArgument,
          "kernel dimensions must be odd");
}

// Rank-one kernels k(a, b) = u[a] v[b] are applied as two 1-D passes.
bool separable_factors(const RealImage& k, std::vector<double>& u, std::vector<double>& v) {
  std::size_t pa = 0, pb = 0;
  double peak = 0.0;
  for (std::size_t a = 0; a < k.nx(); ++a) {
    for (std::size_t b = 0; b < k.nz(); ++b) {
      if (std::abs(k(a, b)) > peak) {
        peak = std::abs(k(a, b));
        pa = a;
        pb = b;
      }
    }
  }
  if (peak == 0.0) return false;
  u.resize(k.nx());
  v.resize(k.nz());
  for (std::size_t a = 0; a < k.nx(); ++a) u[a] = k(a, pb);
  for (std::size_t b = 0; b < k.nz(); ++b) v[b] = k(pa, b) / k(pa, pb);
  for (std::size_t a = 0; a < k.nx(); ++a) {
    for (std::size_t b = 0; b < k.nz(); ++b) {
      if (std::abs(k(a, b) - u[a] * v[b]) > 1e-13 * peak) return false;
    }
  }
  return true;
}

template <int Sign>
RealImage separable_shift_sum(const RealImage& in, std::span<const double> u,
                              std::span<const double> v) {
  const auto nx = static_cast<std::ptrdiff_t>(in.nx());
  const auto nz = static_cast<std::ptrdiff_t>(in.nz());
  const auto cx = static_cast<std::ptrdiff_t>(u.size() / 2);
  const auto cz = static_cast<std::ptrdiff_t>(v.size() / 2);
  RealImage tmp(in.nx(), in.nz());
  for (std::ptrdiff_t i = 0; i < nx; ++i) {
    auto dst = tmp.line(static_cast<std::size_t>(i));
    for (std::ptrdiff_t a = 0; a < static_cast<std::ptrdiff_t>(u.size()); ++a) {
      const std::ptrdiff_t src = i + Sign * (a - cx);
      if (src < 0 || src >= nx || u[static_cast<std::size_t>(a)] == 0.0) continue;
      const auto line = in.line(static_cast<std::size_t>(src));
      const double w = u[static_cast<std::size_t>(a)];
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += w * line[j];
    }
  }
  RealImage out(in.nx(), in.nz());
  for (std::ptrdiff_t i = 0; i < nx; ++i) {
    const auto line = tmp.line(static_cast<std::size_t>(i));
    auto dst = out.line(static_cast<std::size_t>(i));
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(v.size()); ++b) {
      const double w = v[static_cast<std::size_t>(b)];
      if (w == 0.0) continue;
      const std::ptrdiff_t dz = Sign * (b - cz);
      for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, -dz); j < std::min(nz, nz - dz); ++j) {
        dst[static_cast<std::size_t>(j)] += w * line[static_cast<std::size_t>(j + dz)];
      }
    }
  }
  return out;
}

template <int Sign>
RealImage shift_sum(const RealImage& in, const RealImage& kernel) {
  require_odd_kernel(kernel);
  std::vector<double> u, v;
  if (separable_factors(kernel, u, v)) return separable_shift_sum<Sign>(in, u, v);
  const auto nx = static_cast<std::ptrdiff_t>(in.nx());
  const auto nz = static_cast<std::ptrdiff_t>(in.nz());
  const auto cx = static_cast<std::ptrdiff_t>(kernel.nx() / 2);
  const auto cz = static_cast<std::ptrdiff_t>(kernel.nz() / 2);
  RealImage out(in.nx(), in.nz());
  for (std::ptrdiff_t a = 0; a < static_cast<std::ptrdiff_t>(kernel.nx()); ++a) {
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(kernel.nz()); ++b) {
      const double k = kernel(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
      if (k == 0.0) continue;
      // convolution reads in(i - da, j - db); correlation reads in(i + da, j + db)
      const std::ptrdiff_t dx = Sign * (a - cx);
      const std::ptrdiff_t dz = Sign * (b - cz);
      for (std::ptrdiff_t i = std::max<std::ptrdiff_t>(0, -dx);
           i < std::min(nx, nx - dx); ++i) {
        const auto src = in.line(static_cast<std::size_t>(i + dx));
        auto dst = out.line(static_cast<std::size_t>(i));
        for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, -dz); j < std::min(nz, nz - dz);
             ++j) {
          dst[static_cast<std::size_t>(j)] += k * src[static_cast<std::size_t>(j + dz)];
        }
      }
    }
  }
  return out;
}

RealImage to_image(std::span<const cplx> v, std::size_t nx, std::size_t nz) {
  RealImage img(nx, nz);
  for (std::size_t i = 0; i < v.size(); ++i) img.data()[i] = v[i].real();
  return img;
}

}  // namespace

RealImage convolve_same(const RealImage& x, const RealImage& kernel) {
  return shift_sum<-1>(x, kernel);
}

RealImage correlate_same(const RealImage& y, const RealImage& kernel) {
  return shift_sum<1>(y, kernel);
}

LinearOperator blur_operator(std::size_t nx, std::size_t nz, const RealImage& psf) {
  require_odd_kernel(psf);
  require(psf.nx() <= nx && psf.nz() <= nz, ErrorKind::InvalidArgument,
          "psf must not be larger than the image");
  LinearOperator op;
  op.rows = nx * nz;
  op.cols = nx * nz;
  op.real_domain = true;
  op.forward = [nx, nz, psf](std::span<const cplx> x, std::span<cplx> y) {
    const auto out = convolve_same(to_image(x, nx, nz), psf);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = out.data()[i];
  };
  op.adjoint = [nx, nz, psf](std::span<const cplx> y, std::span<cplx> x) {
    const auto out = correlate_same(to_image(y, nx, nz), psf);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = out.data()[i];
  };
  return op;
}

RealImage deconvolve(const RealImage& y, const RealImage& psf, double lambda,
                     const SolverSettings& settings) {
  SparseProblem p;
  p.op = blur_operator(y.nx(), y.nz(), psf);
  p.y.assign(y.data().begin(), y.data().end());
  p.lambda = lambda;
  p.max_iters = settings.max_iters;
  p.tol = settings.tol;
  const auto res = ista(p);
  return to_image(res.x, y.nx(), y.nz());
}

}  // namespace usmb::sparse
