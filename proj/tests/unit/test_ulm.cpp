// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "usmb/error.hpp"
#include "usmb/random.hpp"
#include "usmb/ulm.hpp"

using namespace usmb;

namespace {

std::pair<std::size_t, std::size_t> argmax(const RealImage& im) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < im.size(); ++i) {
    if (im.data()[i] > im.data()[best]) best = i;
  }
  return {best / im.nz(), best % im.nz()};
}

}  // namespace

TEST_CASE("gaussian psf and rendering") {
  const auto k = ulm::gaussian_psf(1.5);
  CHECK(k.nx() == 13);
  CHECK(k.nz() == 13);
  CHECK(k(6, 6) == doctest::Approx(1.0));
  CHECK(k(7, 6) == doctest::Approx(std::exp(-1.0 / (2.0 * 2.25))));

  const std::vector<ulm::HrPoint> pts{{5.0, 9.0}};
  const auto hr = ulm::render_bubbles(pts, 16, 20, 2.0);
  CHECK(argmax(hr) == std::pair<std::size_t, std::size_t>{5, 9});
  CHECK(hr(5, 9) == doctest::Approx(1.0));
  CHECK(hr(5, 11) == doctest::Approx(std::exp(-0.5)));
  const auto same = ulm::block_average(hr, 1);
  CHECK(same.data() == hr.data());
}

TEST_CASE("block average and spread are adjoint") {
  RngStream rng(1, 0);
  RealImage hr(12, 8), lr(3, 2);
  for (auto& v : hr.data()) v = rng.normal();
  for (auto& v : lr.data()) v = rng.normal();
  const auto a = ulm::block_average(hr, 4);
  const auto b = ulm::block_spread(lr, 4);
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < lr.size(); ++i) lhs += a.data()[i] * lr.data()[i];
  for (std::size_t i = 0; i < hr.size(); ++i) rhs += hr.data()[i] * b.data()[i];
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));

  RealImage flat(8, 8);
  for (auto& v : flat.data()) v = 2.5;
  const auto avg = ulm::block_average(flat, 4);
  for (double v : avg.data()) CHECK(v == doctest::Approx(2.5));
  CHECK_THROWS_AS(ulm::block_average(RealImage(10, 8), 4), Error);
  CHECK_NOTHROW(numerics::check_adjoint(ulm::localization_operator(16, 12, ulm::gaussian_psf(1.0), 4)));
}

TEST_CASE("bubble simulation") {
  ulm::BubbleSimConfig cfg;
  cfg.hr_nx = 32;
  cfg.hr_nz = 32;
  cfg.frames = 200;
  cfg.seed = 11;
  const auto a = ulm::simulate_bubbles(cfg);
  const auto b = ulm::simulate_bubbles(cfg);
  REQUIRE(a.size() == 200);
  double count = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    CHECK(a[t].image.data() == b[t].image.data());
    CHECK(a[t].image.nx() == 8);
    count += static_cast<double>(a[t].truth.size());
    for (const auto& p : a[t].truth) {
      CHECK((p.x >= 0.0 && p.x <= 31.0 && p.z >= 0.0 && p.z <= 31.0));
    }
  }
  CHECK(count / 200.0 == doctest::Approx(10.0).epsilon(0.05));

  // No bubbles: the frames are zero-mean noise at the configured level.
  cfg.mean_bubbles = 0.0;
  cfg.frames = 20;
  double sum = 0.0, sq = 0.0, n = 0.0;
  for (const auto& f : ulm::simulate_bubbles(cfg)) {
    CHECK(f.truth.empty());
    for (double v : f.image.data()) {
      sum += v;
      sq += v * v;
      n += 1.0;
    }
  }
  const double sigma = std::pow(10.0, -30.0 / 20.0);
  CHECK(std::abs(sum / n) < 4.0 * sigma / std::sqrt(n));
  CHECK(std::sqrt(sq / n) == doctest::Approx(sigma).epsilon(0.1));

  // Practically noise-free frames equal the block-averaged rendering.
  cfg.mean_bubbles = 5.0;
  cfg.snr_db = 300.0;
  for (const auto& f : ulm::simulate_bubbles(cfg)) {
    const auto clean = ulm::block_average(ulm::render_bubbles(f.truth, 32, 32, 2.0), 4);
    for (std::size_t i = 0; i < clean.size(); ++i) CHECK(std::abs(clean.data()[i] - f.image.data()[i]) < 1e-12);
  }
}

TEST_CASE("sparse localization") {
  const auto psf = ulm::gaussian_psf(2.0);
  const auto zero = ulm::localize_sparse(RealImage(8, 8), psf, 0.1, 4);
  CHECK(zero.nx() == 32);
  for (double v : zero.data()) CHECK(v == 0.0);

  const std::vector<ulm::HrPoint> pts{{13.0, 18.0}};
  const auto frame = ulm::block_average(ulm::render_bubbles(pts, 32, 32, 2.0), 4);
  const auto x = ulm::localize_sparse(frame, psf, 0.01, 4, {3000, 1e-8});
  for (double v : x.data()) CHECK(v >= 0.0);
  const auto [px, pz] = argmax(x);
  CHECK(std::abs(static_cast<double>(px) - 13.0) <= 1.0);
  CHECK(std::abs(static_cast<double>(pz) - 18.0) <= 1.0);
  const auto c = ulm::support_clusters(x);
  REQUIRE(!c.empty());
  CHECK(std::hypot(c.front().x - 13.0, c.front().z - 18.0) < 1.5);
}

TEST_CASE("centroid detection") {
  const std::vector<ulm::HrPoint> pts{{10.0, 12.0}, {30.0, 5.0}};
  auto im = ulm::render_bubbles(pts, 40, 20, 1.5);
  for (std::size_t i = 0; i < im.size(); ++i) {
    if (im.data()[i] < 1e-3) im.data()[i] = 0.0;
  }
  const auto d = ulm::detect_centroids(im, 0.5, 2);
  REQUIRE(d.size() == 2);
  CHECK(d[0].x == doctest::Approx(10.0));
  CHECK(d[0].z == doctest::Approx(12.0));
  CHECK(d[1].x == doctest::Approx(30.0));
  CHECK(d[0].intensity == doctest::Approx(1.0));
  CHECK(ulm::detect_centroids(RealImage(5, 5), 0.5, 1).empty());

  RngStream rng(3, 0);
  RealImage noise(30, 30);
  for (auto& v : noise.data()) v = std::abs(rng.normal());
  std::size_t prev = noise.size();
  for (double th : {0.05, 0.2, 0.4, 0.6, 0.8, 0.95}) {
    const auto n = ulm::detect_centroids(noise, th, 1).size();
    CHECK(n <= prev);
    prev = n;
  }
  const auto lr = ulm::lr_to_hr({0.0, 2.0, 1.0}, 4);
  CHECK(lr.x == doctest::Approx(1.5));
  CHECK(lr.z == doctest::Approx(9.5));
}

TEST_CASE("accumulate") {
  const std::vector<ulm::LocalizationSet> sets{
      {{{1.2, 2.6, 1.0}, {-5.0, 200.0, 1.0}}},
      {{{0.8, 3.4, 7.0}}},
  };
  const auto h = ulm::accumulate(sets, 4, 6);
  CHECK(h(1, 3) == 2.0);
  CHECK(h(0, 5) == 1.0);
  double total = 0.0;
  for (double v : h.data()) total += v;
  CHECK(total == 3.0);
}

TEST_CASE("score examples") {
  const std::vector<ulm::HrPoint> truth{{1, 1}, {10, 10}, {20, 5}};
  std::vector<ulm::Detection> det{{1, 1, 1}, {10.5, 10, 1}, {50, 50, 1}};
  const auto s = ulm::score(det, truth, 1.0);
  CHECK(s.matched == 2);
  CHECK(s.precision == doctest::Approx(2.0 / 3.0));
  CHECK(s.recall == doctest::Approx(2.0 / 3.0));
  CHECK(s.mean_error == doctest::Approx(0.25));

  const auto none = ulm::score(std::vector<ulm::Detection>{}, truth, 1.0);
  CHECK(none.precision == 1.0);
  CHECK(none.recall == 0.0);
  const auto empty_truth = ulm::score(det, std::vector<ulm::HrPoint>{}, 1.0);
  CHECK(empty_truth.recall == 1.0);
  CHECK(empty_truth.precision == 0.0);

  // Order of the inputs does not matter.
  RngStream rng(4, 0);
  std::vector<ulm::HrPoint> t2;
  std::vector<ulm::Detection> d2;
  for (int i = 0; i < 30; ++i) {
    t2.push_back({rng.uniform(0, 20), rng.uniform(0, 20)});
    d2.push_back({rng.uniform(0, 20), rng.uniform(0, 20), 1.0});
  }
  const auto a = ulm::score(d2, t2, 2.0);
  std::reverse(t2.begin(), t2.end());
  std::rotate(d2.begin(), d2.begin() + 7, d2.end());
  const auto b = ulm::score(d2, t2, 2.0);
  CHECK(a.matched == b.matched);
  CHECK(a.mean_error == doctest::Approx(b.mean_error));
}
