// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <functional>

#include "usmb/error.hpp"
#include "usmb/metrics.hpp"
#include "usmb/random.hpp"

using namespace usmb;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::Io;
}

// 4 x 2 grid: left half is region A, right half region B.
const ImagingGrid kGrid = ImagingGrid::uniform(0.0, 3.0, 4, 1.0, 2.0, 2);
const metrics::Region kA{0.0, 1.0, 1.0, 2.0};
const metrics::Region kB{2.0, 1.0, 3.0, 2.0};

RealImage halves(double a0, double a1, double b0, double b1) {
  RealImage im(4, 2);
  for (std::size_t iz = 0; iz < 2; ++iz) {
    im(0, iz) = a0;
    im(1, iz) = a1;
    im(2, iz) = b0;
    im(3, iz) = b1;
  }
  return im;
}

}  // namespace

TEST_CASE("fwhm examples") {
  std::vector<double> g;
  const double dx = 1e-5;
  for (int i = -600; i <= 600; ++i) {
    const double x = i * dx;
    g.push_back(std::exp(-x * x / (2.0 * 1e-6)));
  }
  CHECK(metrics::fwhm(g, dx) == doctest::Approx(2.0 * std::sqrt(2.0 * std::log(2.0)) * 1e-3).epsilon(1e-4));

  const std::vector<double> rect{0, 1, 1, 1, 0};
  CHECK(metrics::fwhm(rect, 1.0) == doctest::Approx(3.0));
  const std::vector<double> tri{0, 1, 2, 1, 0};
  CHECK(metrics::fwhm(tri, 0.5) == doctest::Approx(1.0));

  const std::vector<double> edge{2, 1.5, 0};
  CHECK(kind_of([&] { metrics::fwhm(edge, 1.0); }) == ErrorKind::HalfLevelNotCrossed);
  const std::vector<double> zeros{0, 0, 0};
  CHECK(kind_of([&] { metrics::fwhm(zeros, 1.0); }) == ErrorKind::NoPeak);
}

TEST_CASE("contrast examples") {
  CHECK(metrics::contrast_db(halves(1, 1, 1, 1), kGrid, kA, kB) == doctest::Approx(0.0));
  CHECK(metrics::contrast_db(halves(10, 10, 1, 1), kGrid, kA, kB) == doctest::Approx(20.0));
  RngStream rng(1, 0);
  RealImage im(4, 2);
  for (auto& v : im.data()) v = rng.uniform(0.1, 2.0);
  const double ab = metrics::contrast_db(im, kGrid, kA, kB);
  CHECK(metrics::contrast_db(im, kGrid, kB, kA) == doctest::Approx(-ab));
  CHECK(kind_of([&] { metrics::contrast_db(halves(1, 1, 0, 0), kGrid, kA, kB); }) ==
        ErrorKind::ZeroMeanB);
  const metrics::Region outside{5.0, 5.0, 6.0, 6.0};
  CHECK(kind_of([&] { metrics::contrast_db(im, kGrid, kA, outside); }) == ErrorKind::EmptyRegion);
}

TEST_CASE("cnr examples") {
  CHECK(kind_of([&] { metrics::cnr(halves(3, 3, 1, 1), kGrid, kA, kB); }) ==
        ErrorKind::ZeroVarianceBoth);
  // A: {0, 2} mean 1 var 1; B: {3, 5} mean 4 var 1.
  CHECK(metrics::cnr(halves(0, 2, 3, 5), kGrid, kA, kB) == doctest::Approx(3.0 / std::sqrt(2.0)));
  CHECK(metrics::cnr(halves(0, 2, 1, 1), kGrid, kA, kB) == 0.0);
  RngStream rng(2, 0);
  RealImage im(4, 2);
  for (auto& v : im.data()) v = rng.uniform(0.1, 2.0);
  RealImage scaled = im;
  for (auto& v : scaled.data()) v *= 7.5;
  CHECK(metrics::cnr(scaled, kGrid, kA, kB) == doctest::Approx(metrics::cnr(im, kGrid, kA, kB)));
}

TEST_CASE("nmse and psnr") {
  const std::vector<double> ref{1, 2, 3};
  CHECK(metrics::nmse(ref, ref) == 0.0);
  const std::vector<double> zero{0, 0, 0};
  CHECK(metrics::nmse(zero, ref) == doctest::Approx(1.0));
  const std::vector<double> dbl{2, 4, 6};
  CHECK(metrics::nmse(dbl, ref) == doctest::Approx(1.0));
  const std::vector<cplx> cr{cplx(0, 1), cplx(1, 0)};
  const std::vector<cplx> ce{cplx(0, 1), cplx(0, 0)};
  CHECK(metrics::nmse(ce, cr) == doctest::Approx(0.5));
  CHECK(kind_of([&] { metrics::nmse(ref, zero); }) == ErrorKind::ZeroReference);
  CHECK(std::isinf(metrics::psnr(ref, ref)));
  const std::vector<double> off{1, 2, 4};
  CHECK(metrics::psnr(off, ref) == doctest::Approx(10.0 * std::log10(9.0 * 3.0)));
}
