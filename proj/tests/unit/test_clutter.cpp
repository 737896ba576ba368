// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "usmb/clutter.hpp"
#include "usmb/error.hpp"
#include "usmb/random.hpp"

using namespace usmb;
using numerics::CMatrix;

namespace {

CMatrix random_matrix(std::size_t m, std::size_t n, RngStream& rng) {
  CMatrix a(m, n);
  for (auto& v : a.data()) v = cplx(rng.normal(), rng.normal());
  return a;
}

double fro2(const CMatrix& a) {
  double s = 0.0;
  for (const auto& v : a.data()) s += std::norm(v);
  return s;
}

CMatrix diff(const CMatrix& a, const CMatrix& b) {
  CMatrix d = a;
  for (std::size_t i = 0; i < d.data().size(); ++i) d.data()[i] -= b.data()[i];
  return d;
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

}  // namespace

TEST_CASE("casorati row order and round trip") {
  ComplexImage f0(2, 2), f1(2, 2);
  f0(0, 0) = 1;
  f0(0, 1) = 2;
  f0(1, 0) = 3;
  f0(1, 1) = 4;
  for (std::size_t i = 0; i < 4; ++i) f1.data()[i] = 2.0 * f0.data()[i];
  const std::vector<ComplexImage> frames{f0, f1};
  const auto y = clutter::build_casorati(frames);
  CHECK(y.frames() == 2);
  const cplx col0[4] = {1, 3, 2, 4};
  for (std::size_t r = 0; r < 4; ++r) {
    CHECK(y.data(r, 0) == col0[r]);
    CHECK(y.data(r, 1) == 2.0 * col0[r]);
  }

  RngStream rng(1, 0);
  std::vector<ComplexImage> many(5, ComplexImage(3, 4));
  for (auto& f : many) {
    for (auto& v : f.data()) v = cplx(rng.normal(), rng.normal());
  }
  const auto back = clutter::unbuild_casorati(clutter::build_casorati(many));
  REQUIRE(back.size() == 5);
  for (std::size_t t = 0; t < 5; ++t) CHECK(back[t].data() == many[t].data());

  CHECK_THROWS_AS(clutter::build_casorati(std::vector<ComplexImage>{f0}), Error);
  CHECK_THROWS_AS(clutter::build_casorati(std::vector<ComplexImage>{f0, ComplexImage(2, 3)}), Error);
}

TEST_CASE("svt examples") {
  CMatrix d(2, 2);
  d(0, 0) = 5;
  d(1, 1) = 1;
  const auto s = clutter::svt(d, 2.0);
  CHECK(std::abs(s(0, 0) - cplx(3.0)) < 1e-12);
  CHECK(std::abs(s(1, 1)) < 1e-12);
  CHECK(std::abs(s(0, 1)) < 1e-12);
  CHECK(max_abs_diff(clutter::svt(d, 0.0), d) < 1e-12);
  const auto gone = clutter::svt(d, 5.0);
  for (const auto& v : gone.data()) CHECK(std::abs(v) < 1e-12);
  CHECK(clutter::nuclear_norm(d) == doctest::Approx(6.0));
}

TEST_CASE("mixed l12 threshold examples") {
  CMatrix x(2, 2);
  x(0, 0) = 3;
  x(0, 1) = 4;
  x(1, 0) = 0.3;
  x(1, 1) = cplx(0, 0.4);
  const auto t = clutter::mixed_l12_threshold(x, 1.0);
  CHECK(std::abs(t(0, 0) - cplx(2.4)) < 1e-15);
  CHECK(std::abs(t(0, 1) - cplx(3.2)) < 1e-15);
  CHECK(t(1, 0) == cplx{});
  CHECK(t(1, 1) == cplx{});
  CHECK(clutter::l12_norm(x) == doctest::Approx(5.5));
}

TEST_CASE("thresholds are proximal maps") {
  // prox_f(x) minimizes 0.5 ||w - x||^2 + f(w); random perturbations of the
  // returned point never do better.
  RngStream rng(2, 0);
  const double lambda = 0.7;
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_matrix(6, 4, rng);
    const auto zs = clutter::svt(x, lambda);
    const auto zl = clutter::mixed_l12_threshold(x, lambda);
    const double fs = 0.5 * fro2(diff(zs, x)) + lambda * clutter::nuclear_norm(zs);
    const double fl = 0.5 * fro2(diff(zl, x)) + lambda * clutter::l12_norm(zl);
    for (int k = 0; k < 30; ++k) {
      auto p = random_matrix(6, 4, rng);
      const double scale = rng.uniform(1e-3, 0.5);
      auto ws = zs;
      auto wl = zl;
      for (std::size_t i = 0; i < p.data().size(); ++i) {
        ws.data()[i] += scale * p.data()[i];
        wl.data()[i] += scale * p.data()[i];
      }
      CHECK(0.5 * fro2(diff(ws, x)) + lambda * clutter::nuclear_norm(ws) >= fs - 1e-10);
      CHECK(0.5 * fro2(diff(wl, x)) + lambda * clutter::l12_norm(wl) >= fl - 1e-10);
    }
  }
}

TEST_CASE("rpca of a zero matrix") {
  clutter::RpcaOptions opt;
  opt.lambda1 = 1.0;
  opt.lambda2 = 0.5;
  const auto r = clutter::rpca(CMatrix(8, 5), opt);
  for (const auto& v : r.tissue.data()) CHECK(v == cplx{});
  for (const auto& v : r.blood.data()) CHECK(v == cplx{});
  CHECK(r.iterations == 1);
  CHECK(r.converged);
}

TEST_CASE("rpca of a rank-one matrix keeps it in the tissue term") {
  RngStream rng(3, 0);
  std::vector<cplx> u(10), v(6);
  for (auto& a : u) a = cplx(rng.normal(), rng.normal());
  for (auto& a : v) a = cplx(rng.normal(), rng.normal());
  CMatrix y(10, 6);
  for (std::size_t i = 0; i < 10; ++i) {
    for (std::size_t j = 0; j < 6; ++j) y(i, j) = u[i] * std::conj(v[j]);
  }
  clutter::RpcaOptions opt;
  opt.lambda1 = 0.5;
  opt.lambda2 = 100.0;
  opt.max_iters = 5000;
  opt.tol = 1e-12;
  const auto r = clutter::rpca(y, opt);
  for (const auto& b : r.blood.data()) CHECK(std::abs(b) < 1e-12);
  // With the blood term at zero the fixed point is SVT of Y at lambda1.
  const auto expect = clutter::svt(y, opt.lambda1);
  CHECK(max_abs_diff(r.tissue, expect) < 1e-6);
}

TEST_CASE("rpca scales with the data and its objective never increases") {
  RngStream rng(4, 0);
  const auto y = random_matrix(12, 8, rng);
  clutter::RpcaOptions opt;
  opt.lambda1 = 1.5;
  opt.lambda2 = 0.8;
  opt.max_iters = 400;
  opt.tol = 1e-9;
  const auto a = clutter::rpca(y, opt);
  for (std::size_t i = 1; i < a.objective.size(); ++i) {
    CHECK(a.objective[i] <= a.objective[i - 1] * (1.0 + 1e-12));
  }

  const double alpha = 3.5;
  CMatrix ys = y;
  for (auto& v : ys.data()) v *= alpha;
  auto scaled = opt;
  scaled.lambda1 *= alpha;
  scaled.lambda2 *= alpha;
  const auto b = clutter::rpca(ys, scaled);
  CHECK(b.iterations == a.iterations);
  for (std::size_t i = 0; i < y.data().size(); ++i) {
    CHECK(std::abs(b.tissue.data()[i] - alpha * a.tissue.data()[i]) < 1e-9 * alpha);
    CHECK(std::abs(b.blood.data()[i] - alpha * a.blood.data()[i]) < 1e-9 * alpha);
  }
}

TEST_CASE("rpca defaults and power doppler") {
  RngStream rng(5, 0);
  const auto y = random_matrix(9, 4, rng);
  const double s1 = numerics::svd(y).singular_values[0];
  CHECK(clutter::default_lambda1(y) == doctest::Approx(s1 / 3.0));
  clutter::RpcaOptions opt;
  opt.max_iters = 3;
  const auto r = clutter::rpca(y, opt);
  CHECK(r.lambda1 == doctest::Approx(s1 / 3.0));
  CHECK(r.lambda2 == doctest::Approx(s1 / 6.0));

  CMatrix b(4, 2);
  b(2, 0) = 3;
  b(2, 1) = 4;
  const auto pd = clutter::power_doppler(b, 2, 2);
  CHECK(pd(0, 1) == doctest::Approx(5.0));
  CHECK(pd(1, 1) == 0.0);
  CHECK_THROWS_AS(clutter::power_doppler(b, 3, 2), Error);
}
