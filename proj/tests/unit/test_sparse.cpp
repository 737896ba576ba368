// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "usmb/error.hpp"
#include "usmb/random.hpp"
#include "usmb/sparse.hpp"

using namespace usmb;
using numerics::CMatrix;

namespace {

sparse::SparseProblem scalar_problem(double y, double lambda) {
  sparse::SparseProblem p;
  p.op = numerics::dense_operator(CMatrix::identity(1));
  p.y = {cplx(y)};
  p.lambda = lambda;
  return p;
}

// Zero-padded "same" convolution, kernel centered on its middle sample.
RealImage direct_convolve(const RealImage& x, const RealImage& k) {
  RealImage out(x.nx(), x.nz());
  const auto cx = static_cast<std::ptrdiff_t>(k.nx() / 2);
  const auto cz = static_cast<std::ptrdiff_t>(k.nz() / 2);
  for (std::ptrdiff_t ix = 0; ix < static_cast<std::ptrdiff_t>(x.nx()); ++ix) {
    for (std::ptrdiff_t iz = 0; iz < static_cast<std::ptrdiff_t>(x.nz()); ++iz) {
      double s = 0.0;
      for (std::ptrdiff_t a = 0; a < static_cast<std::ptrdiff_t>(k.nx()); ++a) {
        for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(k.nz()); ++b) {
          const auto sx = ix - (a - cx);
          const auto sz = iz - (b - cz);
          if (sx < 0 || sz < 0 || sx >= static_cast<std::ptrdiff_t>(x.nx()) ||
              sz >= static_cast<std::ptrdiff_t>(x.nz())) {
            continue;
          }
          s += k(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) *
               x(static_cast<std::size_t>(sx), static_cast<std::size_t>(sz));
        }
      }
      out(static_cast<std::size_t>(ix), static_cast<std::size_t>(iz)) = s;
    }
  }
  return out;
}

RealImage random_image(std::size_t nx, std::size_t nz, RngStream& rng) {
  RealImage im(nx, nz);
  for (auto& v : im.data()) v = rng.normal();
  return im;
}

RealImage gaussian_psf(std::size_t n, double sigma) {
  RealImage k(n, n);
  const double c = static_cast<double>(n / 2);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const double dx = static_cast<double>(a) - c;
      const double dz = static_cast<double>(b) - c;
      k(a, b) = std::exp(-(dx * dx + dz * dz) / (2.0 * sigma * sigma));
    }
  }
  return k;
}

}  // namespace

TEST_CASE("soft threshold examples") {
  const std::vector<cplx> x{3.0, -0.5, cplx(3.0, 4.0), 0.0};
  const auto s = sparse::soft_threshold(x, 1.0);
  CHECK(std::abs(s[0] - cplx(2.0)) < 1e-15);
  CHECK(s[1] == cplx{});
  CHECK(std::abs(s[2] - cplx(2.4, 3.2)) < 1e-15);
  CHECK(s[3] == cplx{});
}

TEST_CASE("soft threshold is non-expansive") {
  RngStream rng(1, 0);
  for (int t = 0; t < 200; ++t) {
    std::vector<cplx> a(5), b(5);
    for (auto& v : a) v = cplx(rng.normal(), rng.normal());
    for (auto& v : b) v = cplx(rng.normal(), rng.normal());
    const double lambda = rng.uniform(0.0, 2.0);
    const auto sa = sparse::soft_threshold(a, lambda);
    const auto sb = sparse::soft_threshold(b, lambda);
    double d_in = 0.0, d_out = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
      d_in += std::norm(a[i] - b[i]);
      d_out += std::norm(sa[i] - sb[i]);
      CHECK(std::abs(sa[i]) <= std::abs(a[i]));
    }
    CHECK(d_out <= d_in + 1e-12);
  }
}

TEST_CASE("ista on a scalar problem") {
  auto r = sparse::ista(scalar_problem(3.0, 1.0));
  CHECK(std::abs(r.x[0] - cplx(2.0)) < 1e-6);
  CHECK(r.objective == doctest::Approx(0.5 + 2.0).epsilon(1e-6));
  r = sparse::ista(scalar_problem(3.0, 5.0));
  CHECK(r.x[0] == cplx{});
  CHECK(r.objective == doctest::Approx(4.5));
  CHECK_THROWS_AS(sparse::ista(scalar_problem(1.0, -1.0)), Error);
}

TEST_CASE("ista objective never increases") {
  RngStream rng(2, 0);
  CMatrix a(15, 30);
  for (auto& v : a.data()) v = cplx(rng.normal(), rng.normal());
  sparse::SparseProblem p;
  p.op = numerics::dense_operator(a);
  p.y.resize(15);
  for (auto& v : p.y) v = cplx(rng.normal(), rng.normal());
  p.lambda = 0.5;
  p.max_iters = 3000;
  const auto r = sparse::ista(p);
  REQUIRE(r.history.size() >= 2);
  for (std::size_t i = 1; i < r.history.size(); ++i) {
    CHECK(r.history[i] <= r.history[i - 1] * (1.0 + 1e-12));
  }
  CHECK(r.objective == doctest::Approx(sparse::lasso_objective(p.op, p.y, r.x, p.lambda)));
}

TEST_CASE("scanline operator") {
  sparse::ScanlineModel m{32, {0, 3, 5, 7, 11, 16}, std::vector<cplx>(6, cplx(0.5, 0.25))};
  const auto op = sparse::scanline_operator(m);
  CHECK(op.rows == 6);
  CHECK(op.cols == 32);
  CHECK_NOTHROW(numerics::check_adjoint(op, 3, 1e-10));

  const auto zero = sparse::recover_scanline(m, std::vector<cplx>(6), 0.1);
  for (double v : zero) CHECK(v == 0.0);

  sparse::ScanlineModel bad = m;
  bad.bins = {0, 0, 1, 2, 3, 4};
  CHECK_THROWS_AS(bad.validate(), Error);
  bad.bins = {0, 1, 2, 3, 4, 40};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("scanline recovery with every bin recovers spikes") {
  const std::size_t n = 16;
  sparse::ScanlineModel m{n, {}, std::vector<cplx>(n, cplx(1.0))};
  for (std::size_t k = 0; k < n; ++k) m.bins.push_back(k);
  std::vector<double> x(n, 0.0);
  x[3] = 1.5;
  x[10] = -2.0;
  const auto y = sparse::scanline_operator(m).apply(std::vector<cplx>(x.begin(), x.end()));
  const auto rec = sparse::recover_scanline(m, y, 1e-3, {20000, 1e-12});
  for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(rec[i] - x[i]) < 1e-3);
}

TEST_CASE("convolution and correlation are adjoint") {
  RngStream rng(4, 0);
  const auto x = random_image(9, 13, rng);
  const auto y = random_image(9, 13, rng);
  for (const auto& k : {random_image(3, 5, rng), gaussian_psf(5, 1.0)}) {
    const auto ax = sparse::convolve_same(x, k);
    const auto aty = sparse::correlate_same(y, k);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      lhs += ax.data()[i] * y.data()[i];
      rhs += x.data()[i] * aty.data()[i];
    }
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
  CHECK_NOTHROW(numerics::check_adjoint(sparse::blur_operator(9, 13, gaussian_psf(5, 1.2)), 5, 1e-10));
}

TEST_CASE("separable and general kernels agree with direct convolution") {
  RngStream rng(5, 0);
  const auto x = random_image(11, 8, rng);
  const auto general = random_image(5, 3, rng);
  RealImage outer(5, 3);
  const double u[5] = {0.2, -1.0, 0.5, 0.3, 1.1};
  const double v[3] = {0.7, 1.0, -0.4};
  for (std::size_t a = 0; a < 5; ++a) {
    for (std::size_t b = 0; b < 3; ++b) outer(a, b) = u[a] * v[b];
  }
  RealImage shift(3, 3);
  shift(2, 1) = 1.0;
  for (const RealImage* k : std::vector<const RealImage*>{&general, &outer, &shift}) {
    const auto fast = sparse::convolve_same(x, *k);
    const auto slow = direct_convolve(x, *k);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(fast.data()[i] - slow.data()[i]) < 1e-12);
  }
  // A kernel with its tap one step right of center moves content one pixel right.
  const auto moved = sparse::convolve_same(x, shift);
  CHECK(moved(4, 3) == x(3, 3));
  CHECK(moved(0, 3) == 0.0);
}

TEST_CASE("deconvolution examples") {
  RngStream rng(6, 0);
  const auto y = random_image(6, 7, rng);
  RealImage delta(1, 1);
  delta(0, 0) = 1.0;
  const auto d = sparse::deconvolve(y, delta, 0.5, {5000, 1e-12});
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double v = y.data()[i];
    const double expect = std::copysign(std::max(std::abs(v) - 0.5, 0.0), v);
    CHECK(d.data()[i] == doctest::Approx(expect).epsilon(1e-6));
  }
  const auto z = sparse::deconvolve(RealImage(6, 7), gaussian_psf(3, 1.0), 0.1);
  for (double v : z.data()) CHECK(v == 0.0);
  CHECK_THROWS_AS(sparse::deconvolve(y, RealImage(2, 3), 0.1), Error);
}

TEST_CASE("deconvolution localizes separated spikes") {
  const auto psf = gaussian_psf(9, 1.5);
  RealImage x(32, 32);
  const std::size_t pos[3][2] = {{6, 8}, {20, 12}, {14, 25}};
  for (const auto& p : pos) x(p[0], p[1]) = 1.0;
  const auto y = sparse::convolve_same(x, psf);
  const auto aty = sparse::correlate_same(y, psf);
  double top = 0.0;
  for (double v : aty.data()) top = std::max(top, std::abs(v));
  const auto rec = sparse::deconvolve(y, psf, 0.05 * top, {5000, 1e-10});
  for (const auto& p : pos) {
    double best = -1.0;
    std::size_t bx = 0, bz = 0;
    for (std::size_t ix = p[0] - 3; ix <= p[0] + 3; ++ix) {
      for (std::size_t iz = p[1] - 3; iz <= p[1] + 3; ++iz) {
        if (rec(ix, iz) > best) {
          best = rec(ix, iz);
          bx = ix;
          bz = iz;
        }
      }
    }
    CHECK(best > 0.0);
    CHECK(std::max(bx, p[0]) - std::min(bx, p[0]) <= 1);
    CHECK(std::max(bz, p[1]) - std::min(bz, p[1]) <= 1);
  }
}
