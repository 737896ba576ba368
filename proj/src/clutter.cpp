// SPDX-License-Identifier: Apache-2.0
#include "usmb/clutter.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "usmb/error.hpp"

namespace usmb::clutter {

using numerics::CMatrix;

CasoratiMatrix build_casorati(std::span<const ComplexImage> frames) {
  require(frames.size() >= 2, ErrorKind::ShapeMismatch, "a Casorati matrix needs T >= 2 frames");
  const auto& first = frames.front();
  require(first.size() > 0, ErrorKind::ShapeMismatch, "frames must be non-empty");
  CasoratiMatrix out{CMatrix(first.size(), frames.size()), first.nx(), first.nz()};
  for (std::size_t t = 0; t < frames.size(); ++t) {
    require(frames[t].same_shape(first), ErrorKind::ShapeMismatch,
            "frame " + std::to_string(t) + " differs in shape");
    auto col = out.data.col(t);
    for (std::size_t ix = 0; ix < first.nx(); ++ix) {
      for (std::size_t iz = 0; iz < first.nz(); ++iz) col[ix + iz * first.nx()] = frames[t](ix, iz);
    }
  }
  return out;
}

std::vector<ComplexImage> unbuild_casorati(const CasoratiMatrix& y) {
  require(y.data.rows() == y.nx * y.nz, ErrorKind::ShapeMismatch,
          "Casorati row count does not match the frame shape");
  std::vector<ComplexImage> frames;
  frames.reserve(y.frames());
  for (std::size_t t = 0; t < y.frames(); ++t) {
    ComplexImage f(y.nx, y.nz);
    const auto col = y.data.col(t);
    for (std::size_t ix = 0; ix < y.nx; ++ix) {
      for (std::size_t iz = 0; iz < y.nz; ++iz) f(ix, iz) = col[ix + iz * y.nx];
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

namespace {

struct Thresholded {
  CMatrix x;
  double nuclear = 0.0;
};

Thresholded svt_with_norm(const CMatrix& y, double lambda) {
  require(lambda >= 0.0, ErrorKind::InvalidArgument, "threshold must be non-negative");
  const auto dec = numerics::svd(y);
  Thresholded out{CMatrix(y.rows(), y.cols()), 0.0};
  for (std::size_t k = 0; k < dec.singular_values.size(); ++k) {
    const double s = dec.singular_values[k] - lambda;
    if (s <= 0.0) continue;
    out.nuclear += s;
    const auto u = dec.u.col(k);
    const auto v = dec.v.col(k);
    for (std::size_t j = 0; j < y.cols(); ++j) {
      const cplx f = s * std::conj(v[j]);
      auto dst = out.x.col(j);
      for (std::size_t i = 0; i < y.rows(); ++i) dst[i] += u[i] * f;
    }
  }
  return out;
}

double squared_distance(const CMatrix& a, const CMatrix& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) s += std::norm(a.data()[i] - b.data()[i]);
  return s;
}

double relative_change(const CMatrix& before, const CMatrix& after) {
  const double delta = std::sqrt(squared_distance(before, after));
  if (delta == 0.0) return 0.0;
  return delta / std::max(before.frobenius_norm(), after.frobenius_norm());
}

}  // namespace

CMatrix svt(const CMatrix& y, double lambda) { return svt_with_norm(y, lambda).x; }

CMatrix mixed_l12_threshold(const CMatrix& x, double lambda) {
  require(lambda >= 0.0, ErrorKind::InvalidArgument, "threshold must be non-negative");
  CMatrix out(x.rows(), x.cols());
  const auto rows = static_cast<std::ptrdiff_t>(x.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    const auto i = static_cast<std::size_t>(r);
    double nrm = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) nrm += std::norm(x(i, j));
    nrm = std::sqrt(nrm);
    if (nrm <= lambda) continue;
    const double scale = 1.0 - lambda / nrm;
    for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = scale * x(i, j);
  }
  return out;
}

double nuclear_norm(const CMatrix& x) {
  const auto dec = numerics::svd(x);
  double s = 0.0;
  for (double v : dec.singular_values) s += v;
  return s;
}

double l12_norm(const CMatrix& x) {
  double total = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double nrm = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) nrm += std::norm(x(i, j));
    total += std::sqrt(nrm);
  }
  return total;
}

double default_lambda1(const CMatrix& y) {
  const auto dec = numerics::svd(y);
  const double s1 = dec.singular_values.empty() ? 0.0 : dec.singular_values.front();
  return s1 / std::sqrt(static_cast<double>(std::max(y.rows(), y.cols())));
}

RpcaResult rpca(const CMatrix& y, const RpcaOptions& options) {
  require(y.rows() >= 1 && y.cols() >= 2, ErrorKind::ShapeMismatch,
          "RPCA needs a space x time matrix with T >= 2");
  require(options.mu1 > 0.0 && options.mu1 <= 1.0 && options.mu2 > 0.0 && options.mu2 <= 1.0,
          ErrorKind::InvalidArgument, "step sizes must lie in (0, 1]");
  require(options.lambda1 >= 0.0 && options.lambda2 >= 0.0, ErrorKind::InvalidArgument,
          "lambdas must be non-negative (0 selects the default)");
  require(options.max_iters >= 1 && options.tol > 0.0, ErrorKind::InvalidArgument,
          "max_iters must be >= 1 and tol positive");

  RpcaResult res;
  res.lambda1 = options.lambda1 > 0.0 ? options.lambda1 : default_lambda1(y);
  res.lambda2 = options.lambda2 > 0.0 ? options.lambda2 : 0.5 * res.lambda1;
  if (res.lambda1 == 0.0) res.lambda1 = res.lambda2 = 1.0;  // Y = 0
  const double l1 = res.lambda1;
  const double l2 = res.lambda2;

  const std::size_t n = y.data().size();
  CMatrix xt(y.rows(), y.cols());
  CMatrix xb(y.rows(), y.cols());
  CMatrix step_t(y.rows(), y.cols());
  CMatrix step_b(y.rows(), y.cols());

  double obj = 0.5 * std::pow(y.frobenius_norm(), 2);
  res.objective.push_back(obj);
  for (int k = 1; k <= options.max_iters; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const cplx r = y.data()[i] - xt.data()[i] - xb.data()[i];
      step_t.data()[i] = xt.data()[i] + options.mu1 * r;
      step_b.data()[i] = xb.data()[i] + options.mu2 * r;
    }
    auto nt = svt_with_norm(step_t, options.mu1 * l1);
    auto nb = mixed_l12_threshold(step_b, options.mu2 * l2);

    const double ct = relative_change(xt, nt.x);
    const double cb = relative_change(xb, nb);
    double fit = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      fit += std::norm(y.data()[i] - nt.x.data()[i] - nb.data()[i]);
    }
    const double next = 0.5 * fit + l1 * nt.nuclear + l2 * l12_norm(nb);
    if (next > obj + 1e-10 * std::max(obj, 1e-300)) {
      fail(ErrorKind::StepTooLarge, "RPCA objective increased at iteration " +
                                        std::to_string(k) + " (" + std::to_string(obj) + " -> " +
                                        std::to_string(next) + ")");
    }
    obj = next;
    res.objective.push_back(obj);
    xt = std::move(nt.x);
    xb = std::move(nb);
    res.iterations = k;
    if (ct < options.tol && cb < options.tol) {
      res.converged = true;
      break;
    }
  }
  res.tissue = std::move(xt);
  res.blood = std::move(xb);
  return res;
}

RealImage power_doppler(const CMatrix& blood, std::size_t nx, std::size_t nz) {
  require(blood.rows() == nx * nz, ErrorKind::ShapeMismatch,
          "Casorati row count does not match the frame shape");
  RealImage out(nx, nz);
  for (std::size_t ix = 0; ix < nx; ++ix) {
    for (std::size_t iz = 0; iz < nz; ++iz) {
      const std::size_t row = ix + iz * nx;
      double s = 0.0;
      for (std::size_t t = 0; t < blood.cols(); ++t) s += std::norm(blood(row, t));
      out(ix, iz) = std::sqrt(s);
    }
  }
  return out;
}

}  // namespace usmb::clutter
