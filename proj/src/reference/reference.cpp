// SPDX-License-Identifier: Apache-2.0
#include "usmb/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "usmb/random.hpp"

namespace usmb::reference {

namespace {

double tx_leg(const TransmitEvent& ev, Point p) {
  if (const auto* pw = std::get_if<PlaneWave>(&ev.scheme)) {
    return p.x * std::sin(pw->angle) + p.z * std::cos(pw->angle);
  }
  return std::hypot(p.x - ev.origin.x, p.z - ev.origin.z);
}

double delay(const TransmitEvent& ev, Point el, Point p, double v) {
  return ev.t0 + (tx_leg(ev, p) + std::hypot(p.x - el.x, p.z - el.z)) / v;
}

// Gaussian elimination with partial pivoting on a copy.
std::vector<cplx> solve(numerics::CMatrix a, std::vector<cplx> b) {
  const std::size_t n = a.rows();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    }
    require(std::abs(a(piv, k)) > 0.0, ErrorKind::SingularCovariance, "singular covariance");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const cplx f = a(i, k) / a(k, k);
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      b[i] -= f * b[k];
    }
  }
  std::vector<cplx> x(n);
  for (std::size_t k = n; k-- > 0;) {
    cplx s = b[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= a(k, j) * x[j];
    x[k] = s / a(k, k);
  }
  return x;
}

}  // namespace

RfDataCube simulate(const TransducerArray& array, std::span<const TransmitEvent> events,
                    const ScattererField& field, const sim::PulseModel& pulse,
                    const sim::SimulationParams& params) {
  RfDataCube cube;
  cube.num_events = events.size();
  cube.num_channels = array.num_elements();
  cube.num_samples = params.num_samples;
  cube.samples.assign(cube.num_events * cube.num_channels * cube.num_samples, 0.0);
  cube.fs = array.sampling_frequency();
  cube.speed_of_sound = params.speed_of_sound;
  cube.center_frequency = array.center_frequency();
  cube.events.assign(events.begin(), events.end());
  const double sigma = std::sqrt(2.0 * std::log(2.0)) /
                       (std::numbers::pi * pulse.center_frequency * pulse.fractional_bandwidth);
  for (std::size_t e = 0; e < cube.num_events; ++e) {
    for (std::size_t c = 0; c < cube.num_channels; ++c) {
      const CounterRng rng(params.seed, e * cube.num_channels + c);
      for (std::size_t t = 0; t < cube.num_samples; ++t) {
        double v = 0.0;
        for (const auto& s : field.scatterers) {
          const double dt = static_cast<double>(t) / cube.fs -
                            delay(events[e], array.position(c), {s.x, s.z}, params.speed_of_sound);
          v += s.amplitude * pulse.amplitude * std::exp(-dt * dt / (2.0 * sigma * sigma)) *
               std::cos(2.0 * std::numbers::pi * pulse.center_frequency * dt);
        }
        if (params.noise_std > 0.0) v += params.noise_std * rng.normal(t);
        cube.samples[cube.index(e, c, t)] = v;
      }
    }
  }
  return cube;
}

tof::DelayTensor compute_delays(const TransducerArray& array,
                                std::span<const TransmitEvent> events, const ImagingGrid& grid,
                                double speed) {
  tof::DelayTensor out{events.size(), array.num_elements(), grid.nx(), grid.nz(), {}};
  out.delays.resize(out.num_events * out.num_channels * out.nx * out.nz);
  for (std::size_t e = 0; e < out.num_events; ++e) {
    for (std::size_t c = 0; c < out.num_channels; ++c) {
      for (std::size_t ix = 0; ix < out.nx; ++ix) {
        for (std::size_t iz = 0; iz < out.nz; ++iz) {
          out.delays[out.index(e, c, ix, iz)] =
              delay(events[e], array.position(c), grid.pixel(ix, iz), speed);
        }
      }
    }
  }
  return out;
}

std::vector<cplx> analytic_signal(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<cplx> spec(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx s{};
    for (std::size_t t = 0; t < n; ++t) {
      s += x[t] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k * t % n) /
                                      static_cast<double>(n));
    }
    spec[k] = s;
  }
  std::vector<double> h(n, 0.0);
  h[0] = 1.0;
  for (std::size_t k = 1; k < n; ++k) {
    if (2 * k < n) h[k] = 2.0;
    else if (2 * k == n) h[k] = 1.0;
  }
  std::vector<cplx> out(n);
  for (std::size_t t = 0; t < n; ++t) {
    cplx s{};
    for (std::size_t k = 0; k < n; ++k) {
      s += h[k] * spec[k] *
           std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k * t % n) /
                               static_cast<double>(n));
    }
    out[t] = s / static_cast<double>(n);
  }
  return out;
}

FocusedTensor focus(const RfDataCube& cube, const tof::DelayTensor& delays,
                    const ImagingGrid& grid, const tof::FocusOptions& options) {
  const bool stack = options.compounding == tof::Compounding::Stack;
  FocusedTensor out(grid, cube.num_channels, stack ? cube.num_events : 1,
                    !stack && cube.num_events > 1);
  const std::size_t nt = cube.num_samples;
  for (std::size_t e = 0; e < cube.num_events; ++e) {
    for (std::size_t c = 0; c < cube.num_channels; ++c) {
      const auto raw = cube.trace(e, c);
      std::vector<cplx> tr(raw.begin(), raw.end());
      if (options.analytic && nt >= 2) tr = analytic_signal(raw);
      for (std::size_t ix = 0; ix < grid.nx(); ++ix) {
        for (std::size_t iz = 0; iz < grid.nz(); ++iz) {
          const double t = delays.at(e, c, ix, iz) * cube.fs;
          if (t < 0.0 || t > static_cast<double>(nt - 1)) continue;
          const double fl = std::floor(t);
          const auto i0 = static_cast<std::size_t>(fl);
          const std::size_t i1 = std::min(i0 + 1, nt - 1);
          const double w = t - fl;
          out.channels(stack ? e : 0, ix, iz)[c] += (1.0 - w) * tr[i0] + w * tr[i1];
        }
      }
    }
  }
  return out;
}

BeamformedImage das(const FocusedTensor& focused, const ApodizationWindow& apod) {
  const auto& g = focused.grid();
  ComplexImage rf(g.nx(), g.nz());
  for (std::size_t ix = 0; ix < g.nx(); ++ix) {
    for (std::size_t iz = 0; iz < g.nz(); ++iz) {
      const auto y = focused.channels(ix, iz);
      cplx s{};
      for (std::size_t c = 0; c < y.size(); ++c) s += apod.weights[c] * y[c];
      rf(ix, iz) = s / static_cast<double>(y.size());
    }
  }
  return BeamformedImage::from_rf(std::move(rf), g);
}

numerics::CMatrix estimate_covariance(std::span<const std::span<const cplx>> neighborhood,
                                      const bf::CovarianceConfig& cfg) {
  const std::size_t nc = neighborhood.front().size();
  const std::size_t len = cfg.subaperture_length == 0 ? nc / 2 : cfg.subaperture_length;
  numerics::CMatrix cov(len, len);
  double count = 0.0;
  for (const auto& y : neighborhood) {
    for (std::size_t l = 0; l + len <= nc; ++l) {
      for (std::size_t i = 0; i < len; ++i) {
        for (std::size_t j = 0; j < len; ++j) cov(i, j) += y[l + i] * std::conj(y[l + j]);
      }
      count += 1.0;
    }
  }
  double trace = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    for (std::size_t j = 0; j < len; ++j) cov(i, j) /= count;
    trace += cov(i, i).real();
  }
  for (std::size_t i = 0; i < len; ++i) cov(i, i) += cfg.loading * trace / static_cast<double>(len);
  return cov;
}

BeamformedImage mv(const FocusedTensor& focused, const bf::CovarianceConfig& cfg,
                   bf::CovarianceModel model) {
  const auto& g = focused.grid();
  const std::size_t nc = focused.num_channels();
  const std::size_t len = cfg.subaperture_length == 0 ? nc / 2 : cfg.subaperture_length;
  const auto k = static_cast<std::ptrdiff_t>(cfg.axial_half_window);
  ComplexImage rf(g.nx(), g.nz());
  for (std::size_t ix = 0; ix < g.nx(); ++ix) {
    for (std::size_t iz = 0; iz < g.nz(); ++iz) {
      const auto y = focused.channels(ix, iz);
      if (std::all_of(y.begin(), y.end(), [](cplx v) { return v == cplx{}; })) continue;
      numerics::CMatrix cov;
      if (model == bf::CovarianceModel::Identity) {
        cov = numerics::CMatrix::identity(len);
      } else {
        std::vector<std::span<const cplx>> hood;
        for (std::ptrdiff_t d = -k; d <= k; ++d) {
          const auto z = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(iz) + d, 0,
                                                    static_cast<std::ptrdiff_t>(g.nz()) - 1);
          hood.push_back(focused.channels(ix, static_cast<std::size_t>(z)));
        }
        cov = reference::estimate_covariance(hood, cfg);
      }
      auto w = solve(cov, std::vector<cplx>(len, cplx{1.0}));
      cplx sum{};
      for (const auto& v : w) sum += v;
      for (auto& v : w) v /= sum;
      cplx out{};
      const std::size_t subs = nc - len + 1;
      for (std::size_t l = 0; l < subs; ++l) {
        for (std::size_t i = 0; i < len; ++i) out += std::conj(w[i]) * y[l + i];
      }
      rf(ix, iz) = out / static_cast<double>(subs);
    }
  }
  return BeamformedImage::from_rf(std::move(rf), g);
}

RealImage coherence_factor(const FocusedTensor& focused) {
  const auto& g = focused.grid();
  RealImage out(g.nx(), g.nz());
  for (std::size_t ix = 0; ix < g.nx(); ++ix) {
    for (std::size_t iz = 0; iz < g.nz(); ++iz) {
      const auto y = focused.channels(ix, iz);
      cplx num{};
      double den = 0.0;
      for (const auto& v : y) {
        num += v;
        den += std::norm(v);
      }
      out(ix, iz) = den == 0.0 ? 0.0 : std::norm(num) / (static_cast<double>(y.size()) * den);
    }
  }
  return out;
}

BeamformedImage imap(const FocusedTensor& focused, int iterations) {
  const auto& g = focused.grid();
  ComplexImage rf(g.nx(), g.nz());
  for (std::size_t ix = 0; ix < g.nx(); ++ix) {
    for (std::size_t iz = 0; iz < g.nz(); ++iz) {
      const auto y = focused.channels(ix, iz);
      const double c = static_cast<double>(y.size());
      cplx total{};
      for (const auto& v : y) total += v;
      cplx x = total / c;
      for (int it = 0; it < iterations; ++it) {
        double sn = 0.0;
        for (const auto& v : y) sn += std::norm(v - x);
        sn /= c;
        const double sx = std::norm(x);
        x = (c * sx + sn) == 0.0 ? cplx{} : sx / (c * sx + sn) * total;
      }
      rf(ix, iz) = x;
    }
  }
  return BeamformedImage::from_rf(std::move(rf), g);
}

}  // namespace usmb::reference
