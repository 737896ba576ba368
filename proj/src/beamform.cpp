// SPDX-License-Identifier: Apache-2.0
#include "usmb/beamform.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace usmb::bf {

using numerics::CMatrix;

std::size_t CovarianceConfig::resolved_length(std::size_t num_channels) const {
  const std::size_t l = subaperture_length == 0 ? num_channels / 2 : subaperture_length;
  require(l >= 1 && l <= num_channels, ErrorKind::InvalidArgument,
          "subaperture length must satisfy 1 <= L <= C");
  require(loading >= 0.0, ErrorKind::InvalidArgument, "loading must be non-negative");
  return l;
}

namespace {

bool all_zero(std::span<const cplx> y) {
  return std::all_of(y.begin(), y.end(), [](const cplx& v) { return v == cplx{}; });
}

void require_single_event(const FocusedTensor& focused) {
  require(focused.num_events() == 1, ErrorKind::ShapeMismatch,
          "beamformers take a single-event tensor; use select_event or Sum compounding");
}

template <typename PixelFn>
ComplexImage per_pixel(const FocusedTensor& focused, PixelFn&& fn) {
  const auto& grid = focused.grid();
  ComplexImage rf(grid.nx(), grid.nz());
  const auto pixels = static_cast<std::ptrdiff_t>(grid.nx() * grid.nz());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t p = 0; p < pixels; ++p) {
    const auto ix = static_cast<std::size_t>(p) / grid.nz();
    const auto iz = static_cast<std::size_t>(p) % grid.nz();
    rf(ix, iz) = fn(ix, iz);
  }
  return rf;
}

// Adds sum_l y[l:l+L] y[l:l+L]^H into `acc` (lower triangle only) using the
// shift recurrence G(i+1, j+1) = G(i, j) - y_i conj(y_j) + y_{i+n} conj(y_{j+n}).
void accumulate_subaperture_outer(std::span<const cplx> y, std::size_t len, CMatrix& acc) {
  const std::size_t n = y.size() - len + 1;
  std::vector<cplx> g(len * len);
  for (std::size_t i = 0; i < len; ++i) {
    cplx s{};
    for (std::size_t l = 0; l < n; ++l) s += y[l + i] * std::conj(y[l]);
    g[i] = s;  // (i, 0)
  }
  for (std::size_t j = 0; j + 1 < len; ++j) {
    for (std::size_t i = j; i + 1 < len; ++i) {
      g[(j + 1) * len + (i + 1)] =
          g[j * len + i] - y[i] * std::conj(y[j]) + y[i + n] * std::conj(y[j + n]);
    }
  }
  for (std::size_t j = 0; j < len; ++j) {
    for (std::size_t i = j; i < len; ++i) acc(i, j) += g[j * len + i];
  }
}

void finish_covariance(CMatrix& cov, double count, double loading) {
  const std::size_t len = cov.rows();
  double trace = 0.0;
  for (std::size_t j = 0; j < len; ++j) {
    for (std::size_t i = j; i < len; ++i) cov(i, j) /= count;
    cov(j, j) = cov(j, j).real();
    trace += cov(j, j).real();
  }
  for (std::size_t j = 0; j < len; ++j) {
    for (std::size_t i = j + 1; i < len; ++i) cov(j, i) = std::conj(cov(i, j));
  }
  const double add = loading * trace / static_cast<double>(len);
  for (std::size_t j = 0; j < len; ++j) cov(j, j) += add;
}

std::vector<cplx> subaperture_mean(std::span<const cplx> y, std::size_t len) {
  const std::size_t n = y.size() - len + 1;
  std::vector<cplx> out(len);
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t i = 0; i < len; ++i) out[i] += y[l + i];
  }
  for (auto& v : out) v /= static_cast<double>(n);
  return out;
}

struct MvPixel {
  std::vector<cplx> weights;
  CMatrix covariance;
  cplx output;
};

MvPixel mv_pixel(const FocusedTensor& focused, std::size_t ix, std::size_t iz,
                 const CovarianceConfig& cfg, CovarianceModel model) {
  const std::size_t len = cfg.resolved_length(focused.num_channels());
  CMatrix cov = model == CovarianceModel::Identity ? CMatrix::identity(len)
                                                   : pixel_covariance(focused, ix, iz, cfg);
  std::vector<cplx> w;
  try {
    w = mv_weights(cov);
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::SingularMatrix) throw;
    fail(ErrorKind::SingularCovariance, "pixel (" + std::to_string(ix) + ", " +
                                            std::to_string(iz) + "): " + err.what());
  }
  const auto ybar = subaperture_mean(focused.channels(ix, iz), len);
  return {w, std::move(cov), numerics::dot(w, ybar)};
}

}  // namespace

BeamformedImage das(const FocusedTensor& focused, const ApodizationWindow& apod) {
  require_single_event(focused);
  const std::size_t nc = focused.num_channels();
  require(apod.weights.size() == nc, ErrorKind::ShapeMismatch,
          "apodization length does not match the channel count");
  const double inv_c = 1.0 / static_cast<double>(nc);
  auto rf = per_pixel(focused, [&](std::size_t ix, std::size_t iz) {
    const auto y = focused.channels(ix, iz);
    cplx s{};
    for (std::size_t c = 0; c < nc; ++c) s += apod.weights[c] * y[c];
    return s * inv_c;
  });
  return BeamformedImage::from_rf(std::move(rf), focused.grid());
}

CMatrix estimate_covariance(std::span<const std::span<const cplx>> neighborhood,
                            const CovarianceConfig& cfg) {
  require(!neighborhood.empty(), ErrorKind::InvalidArgument, "empty covariance neighborhood");
  const std::size_t nc = neighborhood.front().size();
  const std::size_t len = cfg.resolved_length(nc);
  CMatrix cov(len, len);
  for (const auto& y : neighborhood) {
    require(y.size() == nc, ErrorKind::ShapeMismatch, "neighborhood vectors differ in length");
    accumulate_subaperture_outer(y, len, cov);
  }
  finish_covariance(cov, static_cast<double>(neighborhood.size() * (nc - len + 1)), cfg.loading);
  return cov;
}

CMatrix pixel_covariance(const FocusedTensor& focused, std::size_t ix, std::size_t iz,
                         const CovarianceConfig& cfg) {
  const auto nz = static_cast<std::ptrdiff_t>(focused.grid().nz());
  const auto k = static_cast<std::ptrdiff_t>(cfg.axial_half_window);
  std::vector<std::span<const cplx>> hood;
  hood.reserve(static_cast<std::size_t>(2 * k + 1));
  for (std::ptrdiff_t d = -k; d <= k; ++d) {
    const auto z = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(iz) + d, 0, nz - 1);
    hood.push_back(focused.channels(ix, static_cast<std::size_t>(z)));
  }
  return estimate_covariance(hood, cfg);
}

std::vector<cplx> mv_weights(const CMatrix& covariance) {
  const std::vector<cplx> ones(covariance.rows(), cplx{1.0});
  auto w = numerics::solve_hermitian(covariance, ones, 0.0);
  cplx gain{};
  for (const auto& v : w) gain += v;  // 1^H G^-1 1, real and positive
  for (auto& v : w) v /= gain.real();
  return w;
}

BeamformedImage mv(const FocusedTensor& focused, const CovarianceConfig& cfg,
                   CovarianceModel model) {
  require_single_event(focused);
  cfg.resolved_length(focused.num_channels());
  auto rf = per_pixel(focused, [&](std::size_t ix, std::size_t iz) -> cplx {
    if (all_zero(focused.channels(ix, iz))) return {};
    return mv_pixel(focused, ix, iz, cfg, model).output;
  });
  return BeamformedImage::from_rf(std::move(rf), focused.grid());
}

RealImage coherence_factor(const FocusedTensor& focused) {
  require_single_event(focused);
  const auto& grid = focused.grid();
  RealImage out(grid.nx(), grid.nz());
  const double nc = static_cast<double>(focused.num_channels());
  const auto pixels = static_cast<std::ptrdiff_t>(grid.nx() * grid.nz());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t p = 0; p < pixels; ++p) {
    const auto ix = static_cast<std::size_t>(p) / grid.nz();
    const auto iz = static_cast<std::size_t>(p) % grid.nz();
    const auto y = focused.channels(ix, iz);
    cplx coherent{};
    double total = 0.0;
    for (const auto& v : y) {
      coherent += v;
      total += std::norm(v);
    }
    out(ix, iz) = total > 0.0 ? std::min(1.0, std::norm(coherent) / (nc * total)) : 0.0;
  }
  return out;
}

BeamformedImage cf_weighted_das(const FocusedTensor& focused, const ApodizationWindow& apod) {
  auto base = das(focused, apod);
  const auto cf = coherence_factor(focused);
  for (std::size_t i = 0; i < base.rf.size(); ++i) base.rf.data()[i] *= cf.data()[i];
  return BeamformedImage::from_rf(std::move(base.rf), focused.grid());
}

cplx imap_pixel(std::span<const cplx> y, int iterations) {
  require(iterations >= 1, ErrorKind::InvalidArgument, "iMAP needs at least one iteration");
  const double nc = static_cast<double>(y.size());
  cplx sum{};
  for (const auto& v : y) sum += v;
  cplx x = sum / nc;
  for (int it = 0; it < iterations; ++it) {
    const double signal = std::norm(x);
    double residual = 0.0;
    for (const auto& v : y) residual += std::norm(v - x);
    const double noise = residual / nc;
    const double denom = nc * signal + noise;
    x = denom > 0.0 ? (signal / denom) * sum : cplx{};
  }
  return x;
}

BeamformedImage imap(const FocusedTensor& focused, int iterations) {
  require_single_event(focused);
  require(iterations >= 1, ErrorKind::InvalidArgument, "iMAP needs at least one iteration");
  auto rf = per_pixel(focused, [&](std::size_t ix, std::size_t iz) {
    return imap_pixel(focused.channels(ix, iz), iterations);
  });
  return BeamformedImage::from_rf(std::move(rf), focused.grid());
}

double wiener_gain(double signal_power, double noise_output_power) {
  const double denom = signal_power + noise_output_power;
  return denom > 0.0 ? signal_power / denom : 0.0;
}

BeamformedImage wiener_das(const FocusedTensor& focused) {
  require_single_event(focused);
  const double nc = static_cast<double>(focused.num_channels());
  auto rf = per_pixel(focused, [&](std::size_t ix, std::size_t iz) {
    const auto y = focused.channels(ix, iz);
    cplx x{};
    for (const auto& v : y) x += v / nc;
    double noise = 0.0;
    for (const auto& v : y) noise += std::norm(v - x);
    noise /= nc;
    // w = 1/C and G = noise * I give w^H G w = noise / C
    return wiener_gain(std::norm(x), noise / nc) * x;
  });
  return BeamformedImage::from_rf(std::move(rf), focused.grid());
}

BeamformedImage wiener(const FocusedTensor& focused, const CovarianceConfig& cfg) {
  require_single_event(focused);
  cfg.resolved_length(focused.num_channels());
  auto rf = per_pixel(focused, [&](std::size_t ix, std::size_t iz) -> cplx {
    if (all_zero(focused.channels(ix, iz))) return {};
    const auto px = mv_pixel(focused, ix, iz, cfg, CovarianceModel::Sample);
    const auto gw = px.covariance * std::span<const cplx>(px.weights);
    const double noise = numerics::dot(px.weights, gw).real();
    return wiener_gain(std::norm(px.output), noise) * px.output;
  });
  return BeamformedImage::from_rf(std::move(rf), focused.grid());
}

BeamformedImage compound(std::span<const BeamformedImage> images, CompoundMode mode,
                         const CovarianceConfig& cfg, CovarianceModel model) {
  require(!images.empty(), ErrorKind::InvalidArgument, "compound needs at least one image");
  const auto& grid = images.front().grid;
  for (const auto& img : images) {
    require(img.grid == grid && img.rf.same_shape(images.front().rf), ErrorKind::GridMismatch,
            "compounded images must share one grid");
  }
  const std::size_t ne = images.size();
  const double inv_e = 1.0 / static_cast<double>(ne);
  ComplexImage rf(grid.nx(), grid.nz());
  if (mode == CompoundMode::Mean) {
    for (const auto& img : images) {
      for (std::size_t i = 0; i < rf.size(); ++i) rf.data()[i] += img.rf.data()[i];
    }
    for (auto& v : rf.data()) v *= inv_e;
    return BeamformedImage::from_rf(std::move(rf), grid);
  }

  require(cfg.loading >= 0.0, ErrorKind::InvalidArgument, "loading must be non-negative");
  const auto nx = static_cast<std::ptrdiff_t>(grid.nx());
  const auto nz = static_cast<std::ptrdiff_t>(grid.nz());
  const auto k = static_cast<std::ptrdiff_t>(cfg.axial_half_window);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t p = 0; p < nx * nz; ++p) {
    const auto ix = p / nz;
    const auto iz = p % nz;
    std::vector<cplx> z(ne);
    for (std::size_t e = 0; e < ne; ++e) {
      z[e] = images[e].rf(static_cast<std::size_t>(ix), static_cast<std::size_t>(iz));
    }
    if (all_zero(z)) continue;
    CMatrix cov(ne, ne);
    if (model == CovarianceModel::Identity) {
      cov = CMatrix::identity(ne);
    } else {
      double count = 0.0;
      std::vector<cplx> zn(ne);
      for (std::ptrdiff_t dx = -k; dx <= k; ++dx) {
        for (std::ptrdiff_t dz = -k; dz <= k; ++dz) {
          const auto jx = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(ix + dx, 0, nx - 1));
          const auto jz = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(iz + dz, 0, nz - 1));
          for (std::size_t e = 0; e < ne; ++e) zn[e] = images[e].rf(jx, jz);
          for (std::size_t j = 0; j < ne; ++j) {
            for (std::size_t i = j; i < ne; ++i) cov(i, j) += zn[i] * std::conj(zn[j]);
          }
          count += 1.0;
        }
      }
      finish_covariance(cov, count, cfg.loading);
    }
    std::vector<cplx> w;
    try {
      w = mv_weights(cov);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::SingularMatrix) throw;
      fail(ErrorKind::SingularCovariance, std::string("transmit covariance: ") + err.what());
    }
    rf(static_cast<std::size_t>(ix), static_cast<std::size_t>(iz)) = numerics::dot(w, z);
  }
  return BeamformedImage::from_rf(std::move(rf), grid);
}

}  // namespace usmb::bf
