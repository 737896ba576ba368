// SPDX-License-Identifier: Apache-2.0
#include "usmb/numerics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "usmb/error.hpp"
#include "usmb/random.hpp"

namespace usmb::numerics {

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::adjoint() const {
  CMatrix out(cols_, rows_);
  for (std::size_t j = 0; j < cols_; ++j) {
    for (std::size_t i = 0; i < rows_; ++i) out(j, i) = std::conj((*this)(i, j));
  }
  return out;
}

double CMatrix::frobenius_norm() const { return norm2(data_); }

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  require(a.cols() == b.rows(), ErrorKind::DimensionMismatch, "matrix product shape mismatch");
  CMatrix out(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    auto oc = out.col(j);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cplx bkj = b(k, j);
      if (bkj == cplx{}) continue;
      auto ac = a.col(k);
      for (std::size_t i = 0; i < a.rows(); ++i) oc[i] += ac[i] * bkj;
    }
  }
  return out;
}

CMatrix operator-(const CMatrix& a, const CMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorKind::DimensionMismatch,
          "matrix difference shape mismatch");
  CMatrix out = a;
  for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] -= b.data()[i];
  return out;
}

CMatrix operator+(const CMatrix& a, const CMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorKind::DimensionMismatch,
          "matrix sum shape mismatch");
  CMatrix out = a;
  for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] += b.data()[i];
  return out;
}

std::vector<cplx> operator*(const CMatrix& a, std::span<const cplx> x) {
  require(a.cols() == x.size(), ErrorKind::DimensionMismatch, "matrix-vector shape mismatch");
  std::vector<cplx> y(a.rows());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    auto ac = a.col(j);
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] += ac[i] * x[j];
  }
  return y;
}

cplx dot(std::span<const cplx> a, std::span<const cplx> b) noexcept {
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

double norm2(std::span<const cplx> a) noexcept {
  double s = 0.0;
  for (const auto& v : a) s += std::norm(v);
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// FFT

namespace {

void radix2(std::vector<cplx>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
    const std::size_t half = len / 2;
    // twiddles from direct evaluation; repeated multiplication drifts at large n
    std::vector<cplx> tw(half);
    for (std::size_t k = 0; k < half; ++k) tw[k] = std::polar(1.0, ang * static_cast<double>(k));
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const cplx u = a[i + k];
        const cplx v = a[i + k + half] * tw[k];
        a[i + k] = u + v;
        a[i + k + half] = u - v;
      }
    }
  }
}

std::vector<cplx> bluestein(std::span<const cplx> x, bool inverse) {
  const std::size_t n = x.size();
  const std::size_t m = std::bit_ceil(2 * n - 1);
  const double sign = inverse ? 1.0 : -1.0;
  std::vector<cplx> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the phase argument small
    const std::size_t k2 = (k * k) % (2 * n);
    chirp[k] = std::polar(1.0, sign * std::numbers::pi * static_cast<double>(k2) /
                                   static_cast<double>(n));
  }
  std::vector<cplx> a(m), b(m);
  for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
  b[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) b[k] = b[m - k] = std::conj(chirp[k]);
  radix2(a, false);
  radix2(b, false);
  for (std::size_t k = 0; k < m; ++k) a[k] *= b[k];
  radix2(a, true);
  const double scale = 1.0 / static_cast<double>(m);
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * scale * chirp[k];
  return out;
}

}  // namespace

std::vector<cplx> fft(std::span<const cplx> signal, bool inverse) {
  require(!signal.empty(), ErrorKind::InvalidArgument, "fft of an empty sequence");
  const std::size_t n = signal.size();
  std::vector<cplx> out;
  if (std::has_single_bit(n)) {
    out.assign(signal.begin(), signal.end());
    radix2(out, inverse);
  } else {
    out = bluestein(signal, inverse);
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& v : out) v *= scale;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hermitian solve

std::vector<cplx> solve_hermitian(const CMatrix& a, std::span<const cplx> b, double loading) {
  const std::size_t n = a.rows();
  require(a.cols() == n && b.size() == n, ErrorKind::DimensionMismatch,
          "solve_hermitian expects a square matrix and matching right-hand side");
  require(loading >= 0.0, ErrorKind::InvalidArgument, "diagonal loading must be non-negative");
  double scale = 0.0;
  for (const auto& v : a.data()) scale = std::max(scale, std::abs(v));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = j; i < n; ++i) {
      require(std::abs(a(i, j) - std::conj(a(j, i))) <= 1e-10 * std::max(1.0, scale),
              ErrorKind::InvalidArgument, "matrix is not Hermitian");
    }
  }

  // lower-triangular Cholesky factor, column-major
  CMatrix l(n, n);
  const double pivot_floor = static_cast<double>(n) * 1e-15 * (scale + loading);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j).real() + loading;
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (!(d > pivot_floor)) {
      fail(ErrorKind::SingularMatrix,
           "Cholesky pivot " + std::to_string(d) + " at column " + std::to_string(j));
    }
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      cplx s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / ljj;
    }
  }
  std::vector<cplx> y(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) y[i] -= l(i, k) * y[k];
    y[i] /= l(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t k = ii + 1; k < n; ++k) y[ii] -= std::conj(l(k, ii)) * y[k];
    y[ii] /= l(ii, ii);
  }
  return y;
}

// ---------------------------------------------------------------------------
// SVD

CMatrix SvdResult::reconstruct() const {
  CMatrix us = u;
  for (std::size_t j = 0; j < singular_values.size(); ++j) {
    for (auto& v : us.col(j)) v *= singular_values[j];
  }
  return us * v.adjoint();
}

namespace {

struct QrFactors {
  CMatrix q;  // M x N
  CMatrix r;  // N x N
};

// Householder QR for M >= N.
QrFactors householder_qr(const CMatrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  CMatrix work = a;
  std::vector<std::vector<cplx>> reflectors(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<cplx> v(work.col(k).begin() + static_cast<std::ptrdiff_t>(k), work.col(k).end());
    const double xnorm = norm2(v);
    if (xnorm == 0.0) continue;
    const double a0 = std::abs(v[0]);
    const cplx phase = a0 > 0.0 ? v[0] / a0 : cplx{1.0};
    const cplx alpha = -phase * xnorm;
    v[0] -= alpha;
    const double vnorm = norm2(v);
    if (vnorm == 0.0) continue;
    for (auto& x : v) x /= vnorm;
    for (std::size_t j = k; j < n; ++j) {
      auto col = work.col(j);
      cplx s{};
      for (std::size_t i = 0; i < v.size(); ++i) s += std::conj(v[i]) * col[k + i];
      s *= 2.0;
      for (std::size_t i = 0; i < v.size(); ++i) col[k + i] -= s * v[i];
    }
    reflectors[k] = std::move(v);
  }
  QrFactors out{CMatrix(m, n), CMatrix(n, n)};
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i <= j; ++i) out.r(i, j) = work(i, j);
  }
  for (std::size_t j = 0; j < n; ++j) out.q(j, j) = 1.0;
  for (std::size_t k = n; k-- > 0;) {
    const auto& v = reflectors[k];
    if (v.empty()) continue;
    for (std::size_t j = 0; j < n; ++j) {
      auto col = out.q.col(j);
      cplx s{};
      for (std::size_t i = 0; i < v.size(); ++i) s += std::conj(v[i]) * col[k + i];
      s *= 2.0;
      for (std::size_t i = 0; i < v.size(); ++i) col[k + i] -= s * v[i];
    }
  }
  return out;
}

// Completes the columns of u flagged in `missing` to an orthonormal set.
void complete_orthonormal(CMatrix& u, const std::vector<bool>& missing) {
  const std::size_t m = u.rows();
  std::size_t candidate = 0;
  for (std::size_t j = 0; j < u.cols(); ++j) {
    if (!missing[j]) continue;
    for (; candidate < m; ++candidate) {
      std::vector<cplx> e(m);
      e[candidate] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t k = 0; k < u.cols(); ++k) {
          if (k == j || (missing[k] && k > j)) continue;
          const cplx p = dot(u.col(k), e);
          auto ck = u.col(k);
          for (std::size_t i = 0; i < m; ++i) e[i] -= p * ck[i];
        }
      }
      const double nrm = norm2(e);
      if (nrm > 1e-6) {
        auto cj = u.col(j);
        for (std::size_t i = 0; i < m; ++i) cj[i] = e[i] / nrm;
        ++candidate;
        break;
      }
    }
  }
}

SvdResult svd_tall(const CMatrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  const double fro = a.frobenius_norm();

  QrFactors qr = householder_qr(a);
  CMatrix w = std::move(qr.r);
  CMatrix v = CMatrix::identity(n);

  // Columns below this norm carry no information relative to ||A||_F.
  const double null_sq = std::pow(1e-14 * fro, 2);
  constexpr int kMaxSweeps = 60;
  bool converged = n < 2 || fro == 0.0;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        auto wp = w.col(p);
        auto wq = w.col(q);
        double alpha = 0.0, beta = 0.0;
        cplx gamma{};
        for (std::size_t i = 0; i < n; ++i) {
          alpha += std::norm(wp[i]);
          beta += std::norm(wq[i]);
          gamma += std::conj(wp[i]) * wq[i];
        }
        const double g = std::abs(gamma);
        if (alpha <= null_sq || beta <= null_sq) continue;
        if (g <= 1e-15 * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const cplx e = gamma / g;
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        const cplx se = s * std::conj(e);
        const cplx s_e = s * e;
        for (std::size_t i = 0; i < n; ++i) {
          const cplx xp = wp[i];
          const cplx xq = wq[i];
          wp[i] = c * xp - se * xq;
          wq[i] = s_e * xp + c * xq;
        }
        auto vp = v.col(p);
        auto vq = v.col(q);
        for (std::size_t i = 0; i < n; ++i) {
          const cplx xp = vp[i];
          const cplx xq = vq[i];
          vp[i] = c * xp - se * xq;
          vq[i] = s_e * xp + c * xq;
        }
      }
    }
    converged = !rotated;
  }
  if (!converged) fail(ErrorKind::NoConvergence, "Jacobi SVD exceeded 60 sweeps");

  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) sigma[j] = norm2(w.col(j));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  const double smax = n > 0 ? sigma[order[0]] : 0.0;
  const double null_sigma = std::max(1e-300, static_cast<double>(std::max(m, n)) * 1e-15 * smax);
  SvdResult out{CMatrix(n, n), std::vector<double>(n), CMatrix(n, n)};
  std::vector<bool> missing(n, false);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    out.singular_values[k] = sigma[j];
    std::copy(v.col(j).begin(), v.col(j).end(), out.v.col(k).begin());
    if (sigma[j] > null_sigma) {
      for (std::size_t i = 0; i < n; ++i) out.u(i, k) = w(i, j) / sigma[j];
    } else {
      missing[k] = true;
    }
  }
  out.u = qr.q * out.u;
  if (std::find(missing.begin(), missing.end(), true) != missing.end()) {
    for (std::size_t k = 0; k < n; ++k) {
      if (missing[k]) std::fill(out.u.col(k).begin(), out.u.col(k).end(), cplx{});
    }
    complete_orthonormal(out.u, missing);
  }
  return out;
}

}  // namespace

SvdResult svd(const CMatrix& a) {
  require(a.rows() >= 1 && a.cols() >= 1, ErrorKind::InvalidArgument, "svd of an empty matrix");
  for (const auto& v : a.data()) {
    require(std::isfinite(v.real()) && std::isfinite(v.imag()), ErrorKind::InvalidArgument,
            "svd input must be finite");
  }
  if (a.rows() >= a.cols()) return svd_tall(a);
  SvdResult t = svd_tall(a.adjoint());
  return {std::move(t.v), std::move(t.singular_values), std::move(t.u)};
}

// ---------------------------------------------------------------------------
// Linear operators

std::vector<cplx> LinearOperator::apply(std::span<const cplx> x) const {
  require(x.size() == cols, ErrorKind::DimensionMismatch, "operator input size mismatch");
  std::vector<cplx> y(rows);
  forward(x, y);
  return y;
}

std::vector<cplx> LinearOperator::apply_adjoint(std::span<const cplx> y) const {
  require(y.size() == rows, ErrorKind::DimensionMismatch, "adjoint input size mismatch");
  std::vector<cplx> x(cols);
  adjoint(y, x);
  if (real_domain) {
    for (auto& v : x) v = v.real();
  }
  return x;
}

LinearOperator dense_operator(const CMatrix& a) {
  LinearOperator op;
  op.rows = a.rows();
  op.cols = a.cols();
  op.forward = [a](std::span<const cplx> x, std::span<cplx> y) {
    std::fill(y.begin(), y.end(), cplx{});
    for (std::size_t j = 0; j < a.cols(); ++j) {
      auto c = a.col(j);
      for (std::size_t i = 0; i < a.rows(); ++i) y[i] += c[i] * x[j];
    }
  };
  op.adjoint = [a](std::span<const cplx> y, std::span<cplx> x) {
    for (std::size_t j = 0; j < a.cols(); ++j) x[j] = dot(a.col(j), y);
  };
  return op;
}

namespace {
std::vector<cplx> random_vector(std::size_t n, bool real, RngStream& rng) {
  std::vector<cplx> v(n);
  for (auto& x : v) x = real ? cplx{rng.normal(), 0.0} : cplx{rng.normal(), rng.normal()};
  const double nrm = norm2(v);
  for (auto& x : v) x /= nrm;
  return v;
}
}  // namespace

void check_adjoint(const LinearOperator& op, std::uint64_t seed, double tol) {
  RngStream rng(seed, 0xAD701);
  const auto x = random_vector(op.cols, op.real_domain, rng);
  const auto y = random_vector(op.rows, false, rng);
  const auto ax = op.apply(x);
  const auto ahy = op.apply_adjoint(y);
  cplx lhs = dot(y, ax);  // <Ax, y> as conj(y).Ax
  cplx rhs = dot(ahy, x);
  if (op.real_domain) {
    lhs = lhs.real();
    rhs = rhs.real();
  }
  const double err = std::abs(lhs - rhs);
  if (err > tol * std::max(1.0, norm2(ax))) {
    fail(ErrorKind::AdjointMismatch, "inner-product test failed, |<Ax,y>-<x,A^H y>| = " +
                                         std::to_string(err));
  }
}

double spectral_norm_estimate(const LinearOperator& op, int iters, std::uint64_t seed) {
  require(iters >= 1, ErrorKind::InvalidArgument, "power iteration needs at least one step");
  RngStream rng(seed, 0x90E4);
  auto x = random_vector(op.cols, op.real_domain, rng);
  double lambda = 0.0;
  for (int k = 0; k < iters; ++k) {
    auto z = op.apply_adjoint(op.apply(x));
    const double nz = norm2(z);
    lambda = nz;
    if (nz == 0.0) return 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) x[i] = z[i] / nz;
  }
  return std::sqrt(lambda);
}

double operator_norm(const LinearOperator& op, int iters, std::uint64_t seed) {
  check_adjoint(op, seed);
  return 1.01 * spectral_norm_estimate(op, iters, seed);
}

}  // namespace usmb::numerics
