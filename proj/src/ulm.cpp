// SPDX-License-Identifier: Apache-2.0
#include "usmb/ulm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <tuple>

#include "usmb/error.hpp"
#include "usmb/random.hpp"

namespace usmb::ulm {

namespace {

void add_spot(RealImage& img, HrPoint p, double sigma, double amplitude) {
  const double reach = std::ceil(5.0 * sigma);
  const auto nx = static_cast<double>(img.nx());
  const auto nz = static_cast<double>(img.nz());
  const auto x0 = static_cast<std::size_t>(std::clamp(std::floor(p.x - reach), 0.0, nx - 1));
  const auto x1 = static_cast<std::size_t>(std::clamp(std::ceil(p.x + reach), 0.0, nx - 1));
  const auto z0 = static_cast<std::size_t>(std::clamp(std::floor(p.z - reach), 0.0, nz - 1));
  const auto z1 = static_cast<std::size_t>(std::clamp(std::ceil(p.z + reach), 0.0, nz - 1));
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (std::size_t ix = x0; ix <= x1; ++ix) {
    const double dx = static_cast<double>(ix) - p.x;
    for (std::size_t iz = z0; iz <= z1; ++iz) {
      const double dz = static_cast<double>(iz) - p.z;
      img(ix, iz) += amplitude * std::exp(-(dx * dx + dz * dz) * inv);
    }
  }
}

}  // namespace

RealImage render_bubbles(std::span<const HrPoint> points, std::size_t nx, std::size_t nz,
                         double sigma) {
  require(sigma > 0.0, ErrorKind::InvalidArgument, "psf sigma must be positive");
  RealImage img(nx, nz);
  for (const auto& p : points) add_spot(img, p, sigma, 1.0);
  return img;
}

RealImage gaussian_psf(double sigma) {
  require(sigma > 0.0, ErrorKind::InvalidArgument, "psf sigma must be positive");
  const auto r = static_cast<std::size_t>(std::ceil(4.0 * sigma));
  RealImage k(2 * r + 1, 2 * r + 1);
  const HrPoint center{static_cast<double>(r), static_cast<double>(r)};
  add_spot(k, center, sigma, 1.0);
  return k;
}

RealImage block_average(const RealImage& hr, std::size_t factor) {
  require(factor >= 1, ErrorKind::InvalidArgument, "downsample factor must be >= 1");
  require(hr.nx() % factor == 0 && hr.nz() % factor == 0, ErrorKind::ShapeMismatch,
          "HR dimensions must be divisible by the downsample factor");
  RealImage lr(hr.nx() / factor, hr.nz() / factor);
  const double inv = 1.0 / static_cast<double>(factor * factor);
  for (std::size_t ix = 0; ix < hr.nx(); ++ix) {
    const auto src = hr.line(ix);
    auto dst = lr.line(ix / factor);
    for (std::size_t iz = 0; iz < hr.nz(); ++iz) dst[iz / factor] += src[iz] * inv;
  }
  return lr;
}

RealImage block_spread(const RealImage& lr, std::size_t factor) {
  require(factor >= 1, ErrorKind::InvalidArgument, "downsample factor must be >= 1");
  RealImage hr(lr.nx() * factor, lr.nz() * factor);
  const double inv = 1.0 / static_cast<double>(factor * factor);
  for (std::size_t ix = 0; ix < hr.nx(); ++ix) {
    const auto src = lr.line(ix / factor);
    auto dst = hr.line(ix);
    for (std::size_t iz = 0; iz < hr.nz(); ++iz) dst[iz] = src[iz / factor] * inv;
  }
  return hr;
}

std::vector<BubbleFrame> simulate_bubbles(const BubbleSimConfig& cfg) {
  require(cfg.factor >= 1, ErrorKind::InvalidArgument, "downsample factor must be >= 1");
  require(cfg.psf_sigma > 0.0, ErrorKind::InvalidArgument, "psf sigma must be positive");
  require(cfg.hr_nx >= 1 && cfg.hr_nz >= 1, ErrorKind::InvalidArgument, "empty HR grid");
  require(cfg.mean_bubbles >= 0.0, ErrorKind::InvalidArgument,
          "mean bubble count must be non-negative");
  const double noise = std::pow(10.0, -cfg.snr_db / 20.0);
  std::vector<BubbleFrame> frames(cfg.frames);
  const auto count = static_cast<std::ptrdiff_t>(cfg.frames);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t t = 0; t < count; ++t) {
    RngStream rng(cfg.seed, static_cast<std::uint64_t>(t));
    BubbleFrame& f = frames[static_cast<std::size_t>(t)];
    const unsigned n = rng.poisson(cfg.mean_bubbles);
    for (unsigned b = 0; b < n; ++b) {
      const double x = rng.uniform(0.0, static_cast<double>(cfg.hr_nx - 1));
      const double z = rng.uniform(0.0, static_cast<double>(cfg.hr_nz - 1));
      f.truth.push_back({x, z});
    }
    f.image = block_average(render_bubbles(f.truth, cfg.hr_nx, cfg.hr_nz, cfg.psf_sigma),
                            cfg.factor);
    for (auto& v : f.image.data()) v += noise * rng.normal();
  }
  return frames;
}

numerics::LinearOperator localization_operator(std::size_t hr_nx, std::size_t hr_nz,
                                               const RealImage& psf, std::size_t factor) {
  require(factor >= 1 && hr_nx % factor == 0 && hr_nz % factor == 0, ErrorKind::ShapeMismatch,
          "HR dimensions must be divisible by the downsample factor");
  const std::size_t lr_nx = hr_nx / factor;
  const std::size_t lr_nz = hr_nz / factor;
  numerics::LinearOperator op;
  op.rows = lr_nx * lr_nz;
  op.cols = hr_nx * hr_nz;
  op.real_domain = true;
  op.forward = [=](std::span<const cplx> x, std::span<cplx> y) {
    RealImage hr(hr_nx, hr_nz);
    for (std::size_t i = 0; i < x.size(); ++i) hr.data()[i] = x[i].real();
    const auto lr = block_average(sparse::convolve_same(hr, psf), factor);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = lr.data()[i];
  };
  op.adjoint = [=](std::span<const cplx> y, std::span<cplx> x) {
    RealImage lr(lr_nx, lr_nz);
    for (std::size_t i = 0; i < y.size(); ++i) lr.data()[i] = y[i].real();
    const auto hr = sparse::correlate_same(block_spread(lr, factor), psf);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = hr.data()[i];
  };
  return op;
}

RealImage localize_sparse(const RealImage& frame, const RealImage& psf, double lambda,
                          std::size_t factor, const sparse::SolverSettings& settings) {
  double peak = 0.0;
  for (double v : psf.data()) peak = std::max(peak, v);
  require(std::abs(peak - 1.0) <= 1e-12, ErrorKind::InvalidArgument,
          "psf must be normalized to unit peak");
  const std::size_t hr_nx = frame.nx() * factor;
  const std::size_t hr_nz = frame.nz() * factor;
  sparse::SparseProblem p;
  p.op = localization_operator(hr_nx, hr_nz, psf, factor);
  p.y.assign(frame.data().begin(), frame.data().end());
  p.lambda = lambda;
  p.max_iters = settings.max_iters;
  p.tol = settings.tol;
  p.power_iters = 50;
  const auto res = sparse::ista(p);
  RealImage out(hr_nx, hr_nz);
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = std::max(res.x[i].real(), 0.0);
  return out;
}

std::vector<Detection> detect_centroids(const RealImage& frame, double threshold_fraction,
                                        std::size_t window_radius) {
  require(threshold_fraction > 0.0 && threshold_fraction < 1.0, ErrorKind::InvalidArgument,
          "threshold fraction must lie in (0, 1)");
  require(window_radius >= 1, ErrorKind::InvalidArgument, "window radius must be >= 1");
  double peak = 0.0;
  for (double v : frame.data()) peak = std::max(peak, v);
  if (!(peak > 0.0)) return {};
  const double threshold = threshold_fraction * peak;
  const auto nx = static_cast<std::ptrdiff_t>(frame.nx());
  const auto nz = static_cast<std::ptrdiff_t>(frame.nz());

  // (value, ix, iz)
  std::vector<std::tuple<double, std::ptrdiff_t, std::ptrdiff_t>> candidates;
  for (std::ptrdiff_t ix = 0; ix < nx; ++ix) {
    for (std::ptrdiff_t iz = 0; iz < nz; ++iz) {
      const double v = frame(static_cast<std::size_t>(ix), static_cast<std::size_t>(iz));
      if (v <= threshold) continue;
      bool is_max = true;
      for (std::ptrdiff_t dx = -1; dx <= 1 && is_max; ++dx) {
        for (std::ptrdiff_t dz = -1; dz <= 1; ++dz) {
          const auto jx = ix + dx;
          const auto jz = iz + dz;
          if (jx < 0 || jz < 0 || jx >= nx || jz >= nz) continue;
          if (frame(static_cast<std::size_t>(jx), static_cast<std::size_t>(jz)) > v) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) candidates.emplace_back(v, ix, iz);
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
    return std::get<2>(a) < std::get<2>(b);
  });

  const auto r = static_cast<std::ptrdiff_t>(window_radius);
  const double r2 = static_cast<double>(r * r);
  std::vector<std::tuple<double, std::ptrdiff_t, std::ptrdiff_t>> kept;
  for (const auto& c : candidates) {
    const bool near = std::any_of(kept.begin(), kept.end(), [&](const auto& k) {
      const double dx = static_cast<double>(std::get<1>(k) - std::get<1>(c));
      const double dz = static_cast<double>(std::get<2>(k) - std::get<2>(c));
      return dx * dx + dz * dz <= r2;
    });
    if (!near) kept.push_back(c);
  }

  std::vector<Detection> out;
  out.reserve(kept.size());
  for (const auto& [v, ix, iz] : kept) {
    double sw = 0.0, sx = 0.0, sz = 0.0;
    for (std::ptrdiff_t jx = std::max<std::ptrdiff_t>(0, ix - r); jx <= std::min(nx - 1, ix + r);
         ++jx) {
      for (std::ptrdiff_t jz = std::max<std::ptrdiff_t>(0, iz - r);
           jz <= std::min(nz - 1, iz + r); ++jz) {
        const double w =
            std::max(frame(static_cast<std::size_t>(jx), static_cast<std::size_t>(jz)), 0.0);
        sw += w;
        sx += w * static_cast<double>(jx);
        sz += w * static_cast<double>(jz);
      }
    }
    out.push_back({sx / sw, sz / sw, v});
  }
  return out;
}

std::vector<Detection> support_clusters(const RealImage& img) {
  const std::size_t nx = img.nx();
  const std::size_t nz = img.nz();
  std::vector<int> label(img.size(), -1);
  std::vector<Detection> out;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < img.size(); ++start) {
    if (img.data()[start] == 0.0 || label[start] >= 0) continue;
    const int id = static_cast<int>(out.size());
    double sw = 0.0, sx = 0.0, sz = 0.0;
    stack.assign(1, start);
    label[start] = id;
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      const std::size_t ix = p / nz;
      const std::size_t iz = p % nz;
      const double w = std::abs(img.data()[p]);
      sw += w;
      sx += w * static_cast<double>(ix);
      sz += w * static_cast<double>(iz);
      for (int dx = -1; dx <= 1; ++dx) {
        for (int dz = -1; dz <= 1; ++dz) {
          const auto jx = static_cast<std::ptrdiff_t>(ix) + dx;
          const auto jz = static_cast<std::ptrdiff_t>(iz) + dz;
          if (jx < 0 || jz < 0 || jx >= static_cast<std::ptrdiff_t>(nx) ||
              jz >= static_cast<std::ptrdiff_t>(nz)) {
            continue;
          }
          const std::size_t q = static_cast<std::size_t>(jx) * nz + static_cast<std::size_t>(jz);
          if (img.data()[q] != 0.0 && label[q] < 0) {
            label[q] = id;
            stack.push_back(q);
          }
        }
      }
    }
    out.push_back({sx / sw, sz / sw, sw});
  }
  return out;
}

Detection lr_to_hr(const Detection& d, std::size_t factor) {
  const double f = static_cast<double>(factor);
  return {(d.x + 0.5) * f - 0.5, (d.z + 0.5) * f - 0.5, d.intensity};
}

RealImage accumulate(std::span<const LocalizationSet> sets, std::size_t hr_nx, std::size_t hr_nz) {
  require(hr_nx >= 1 && hr_nz >= 1, ErrorKind::InvalidArgument, "empty HR grid");
  RealImage map(hr_nx, hr_nz);
  const auto bin = [](double v, std::size_t n) {
    const double r = std::round(v);
    if (!(r >= 0.0)) return std::size_t{0};
    return std::min(static_cast<std::size_t>(r), n - 1);
  };
  for (const auto& set : sets) {
    for (const auto& d : set.detections) {
      require(std::isfinite(d.x) && std::isfinite(d.z), ErrorKind::NonFiniteSample,
              "detection coordinates must be finite");
      map(bin(d.x, hr_nx), bin(d.z, hr_nz)) += 1.0;
    }
  }
  return map;
}

Score score(std::span<const Detection> detections, std::span<const HrPoint> truth,
            double match_radius) {
  require(match_radius > 0.0, ErrorKind::InvalidArgument, "match radius must be positive");
  struct Pair {
    double dist;
    std::size_t d;
    std::size_t t;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    for (std::size_t j = 0; j < truth.size(); ++j) {
      const double dist = std::hypot(detections[i].x - truth[j].x, detections[i].z - truth[j].z);
      if (dist <= match_radius) pairs.push_back({dist, i, j});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    return std::tie(a.dist, a.d, a.t) < std::tie(b.dist, b.d, b.t);
  });
  std::vector<bool> used_d(detections.size(), false);
  std::vector<bool> used_t(truth.size(), false);
  Score s;
  double err = 0.0;
  for (const auto& p : pairs) {
    if (used_d[p.d] || used_t[p.t]) continue;
    used_d[p.d] = used_t[p.t] = true;
    ++s.matched;
    err += p.dist;
  }
  const auto m = static_cast<double>(s.matched);
  s.precision = detections.empty() ? 1.0 : m / static_cast<double>(detections.size());
  s.recall = truth.empty() ? 1.0 : m / static_cast<double>(truth.size());
  s.mean_error = s.matched == 0 ? 0.0 : err / m;
  return s;
}

}  // namespace usmb::ulm
