// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>

#include "usmb/core.hpp"
#include "usmb/random.hpp"

using namespace usmb;

namespace {

RfDataCube small_cube() {
  RfDataCube c;
  c.num_events = 1;
  c.num_channels = 2;
  c.num_samples = 16;
  c.samples.assign(32, 0.25);
  c.fs = 4e7;
  c.speed_of_sound = 1540.0;
  c.center_frequency = 5e6;
  c.events = {TransmitEvent::plane_wave(0.0)};
  return c;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("validate accepts a well-formed cube and is idempotent") {
  const auto c = small_cube();
  CHECK_NOTHROW(validate(c));
  CHECK_NOTHROW(validate(c));
}

TEST_CASE("validate names the violated invariant") {
  auto c = small_cube();
  c.speed_of_sound = 0.0;
  CHECK(kind_of([&] { validate(c); }) == ErrorKind::NonPositiveSpeed);

  c = small_cube();
  c.samples[5] = std::numeric_limits<double>::quiet_NaN();
  CHECK(kind_of([&] { validate(c); }) == ErrorKind::NonFiniteSample);

  c = small_cube();
  c.samples.pop_back();
  CHECK(kind_of([&] { validate(c); }) == ErrorKind::DimensionMismatch);

  c = small_cube();
  c.events.clear();
  CHECK_THROWS_AS(validate(c), Error);
}

TEST_CASE("error messages carry the kind name") {
  try {
    fail(ErrorKind::TruncatedPayload, "x");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("truncated-payload") == 0);
  }
}

TEST_CASE("linear array geometry") {
  const auto a = TransducerArray::linear(4, 1e-3, 5e6, 4e7);
  CHECK(a.num_elements() == 4);
  CHECK(a.position(0).x == doctest::Approx(-1.5e-3));
  CHECK(a.position(3).x == doctest::Approx(1.5e-3));
  CHECK(a.pitch() == doctest::Approx(1e-3));
  CHECK_THROWS_AS(TransducerArray::linear(1, 1e-3, 5e6, 4e7), Error);
  CHECK_THROWS_AS(TransducerArray::linear(4, 1e-3, 5e6, 9e6), Error);
}

TEST_CASE("apodization windows") {
  for (std::size_t c : {2u, 5u, 64u}) {
    const auto r = ApodizationWindow::make(ApodizationKind::Rectangular, c);
    for (double w : r.weights) CHECK(w == 1.0);
    for (auto kind : {ApodizationKind::Hanning, ApodizationKind::Hamming}) {
      if (kind == ApodizationKind::Hanning && c == 2) {
        CHECK_THROWS_AS(ApodizationWindow::make(kind, c), Error);
        continue;
      }
      const auto w = ApodizationWindow::make(kind, c);
      REQUIRE(w.weights.size() == c);
      double peak = 0.0;
      for (std::size_t i = 0; i < c; ++i) {
        CHECK(std::abs(w.weights[i] - w.weights[c - 1 - i]) <= 1e-15);
        peak = std::max(peak, w.weights[i]);
      }
      CHECK(peak == doctest::Approx(1.0));
    }
  }
  // Odd-length Hanning hits 1 in the middle and 0 at the ends.
  const auto h = ApodizationWindow::make(ApodizationKind::Hanning, 5);
  CHECK(h.weights[0] == doctest::Approx(0.0));
  CHECK(h.weights[2] == doctest::Approx(1.0));
}

TEST_CASE("imaging grid") {
  const auto g = ImagingGrid::uniform(-1.0, 1.0, 5, 2.0, 3.0, 3);
  CHECK(g.nx() == 5);
  CHECK(g.nz() == 3);
  CHECK(g.lateral()[1] == doctest::Approx(-0.5));
  CHECK(g.axial()[2] == doctest::Approx(3.0));
  CHECK(g.pixel(4, 1).x == doctest::Approx(1.0));
}

TEST_CASE("focused tensor layout keeps channel vectors contiguous") {
  FocusedTensor f(ImagingGrid::uniform(0, 1, 2, 1, 2, 3), 4, 2, false);
  f.channels(1, 1, 2)[3] = cplx(7.0, 1.0);
  const auto sel = f.select_event(1);
  CHECK(sel.num_events() == 1);
  CHECK(sel.channels(1, 2)[3] == cplx(7.0, 1.0));
  CHECK(f.values().size() == 2 * 2 * 3 * 4);
}

TEST_CASE("counter rng is a pure function of (seed, stream, counter)") {
  const CounterRng a(3, 9);
  const CounterRng b(3, 9);
  const CounterRng c(3, 10);
  CHECK(a.bits(17) == b.bits(17));
  CHECK(a.bits(17) != c.bits(17));
  double mean = 0.0;
  double var = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double v = a.normal(static_cast<std::uint64_t>(i));
    mean += v;
    var += v * v;
  }
  mean /= n;
  var = var / n - mean * mean;
  CHECK(std::abs(mean) < 0.03);
  CHECK(var == doctest::Approx(1.0).epsilon(0.03));
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform(static_cast<std::uint64_t>(i));
    CHECK((u > 0.0 && u < 1.0));
  }
}

TEST_CASE("poisson draws match the mean") {
  RngStream s(1, 2);
  double sum = 0.0;
  for (int i = 0; i < 5000; ++i) sum += s.poisson(10.0);
  CHECK(sum / 5000.0 == doctest::Approx(10.0).epsilon(0.03));
}
