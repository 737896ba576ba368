// SPDX-License-Identifier: Apache-2.0
#include "usmb/tof.hpp"

#include <algorithm>
#include <cmath>

#include "usmb/numerics.hpp"
#include "usmb/simulator.hpp"

namespace usmb::tof {

DelayTensor compute_delays(const TransducerArray& array, std::span<const TransmitEvent> events,
                           const ImagingGrid& grid, double speed) {
  require(speed > 0.0, ErrorKind::NonPositiveSpeed, "speed of sound must be positive");
  DelayTensor out{events.size(), array.num_elements(), grid.nx(), grid.nz(), {}};
  out.delays.resize(out.num_events * out.num_channels * out.nx * out.nz);
  const auto planes = static_cast<std::ptrdiff_t>(out.num_events * out.num_channels);
#pragma omp parallel for
  for (std::ptrdiff_t p = 0; p < planes; ++p) {
    const auto e = static_cast<std::size_t>(p) / out.num_channels;
    const auto c = static_cast<std::size_t>(p) % out.num_channels;
    const Point element = array.position(c);
    for (std::size_t ix = 0; ix < out.nx; ++ix) {
      for (std::size_t iz = 0; iz < out.nz; ++iz) {
        out.delays[out.index(e, c, ix, iz)] =
            sim::two_way_delay(events[e], element, grid.pixel(ix, iz), speed);
      }
    }
  }
  return out;
}

std::vector<cplx> analytic_signal(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<cplx> spec(x.begin(), x.end());
  spec = numerics::fft(spec);
  // bins 1..ceil(n/2)-1 doubled; DC and (even n) Nyquist kept; the rest zeroed
  const std::size_t half = n / 2;
  for (std::size_t k = 1; k < n; ++k) {
    if (k < (n + 1) / 2) {
      spec[k] *= 2.0;
    } else if (!(n % 2 == 0 && k == half)) {
      spec[k] = 0.0;
    }
  }
  return numerics::fft(spec, true);
}

FocusedTensor focus(const RfDataCube& cube, const DelayTensor& delays, const ImagingGrid& grid,
                    const FocusOptions& options) {
  require(delays.num_events == cube.num_events && delays.num_channels == cube.num_channels &&
              delays.nx == grid.nx() && delays.nz == grid.nz(),
          ErrorKind::ShapeMismatch, "delay tensor does not match cube and grid");
  require(cube.samples.size() == cube.num_events * cube.num_channels * cube.num_samples,
          ErrorKind::ShapeMismatch, "cube sample count does not match its dimensions");

  const std::size_t num_traces = cube.num_events * cube.num_channels;
  const std::size_t nt = cube.num_samples;
  std::vector<cplx> traces(num_traces * nt);
  const auto nTraces = static_cast<std::ptrdiff_t>(num_traces);
#pragma omp parallel for
  for (std::ptrdiff_t tr = 0; tr < nTraces; ++tr) {
    const auto e = static_cast<std::size_t>(tr) / cube.num_channels;
    const auto c = static_cast<std::size_t>(tr) % cube.num_channels;
    auto src = cube.trace(e, c);
    cplx* dst = traces.data() + static_cast<std::size_t>(tr) * nt;
    if (options.analytic && nt >= 2) {
      const auto a = analytic_signal(src);
      std::copy(a.begin(), a.end(), dst);
    } else {
      std::copy(src.begin(), src.end(), dst);
    }
  }

  const bool stack = options.compounding == Compounding::Stack;
  const std::size_t out_events = stack ? cube.num_events : 1;
  FocusedTensor out(grid, cube.num_channels, out_events, !stack && cube.num_events > 1);
  const double fs = cube.fs;
  const double last = static_cast<double>(nt - 1);
  const auto pixels = static_cast<std::ptrdiff_t>(grid.nx() * grid.nz());

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t p = 0; p < pixels; ++p) {
    const auto ix = static_cast<std::size_t>(p) / grid.nz();
    const auto iz = static_cast<std::size_t>(p) % grid.nz();
    for (std::size_t e = 0; e < cube.num_events; ++e) {
      auto dst = out.channels(stack ? e : 0, ix, iz);
      for (std::size_t c = 0; c < cube.num_channels; ++c) {
        const double t = delays.at(e, c, ix, iz) * fs;
        if (!(t >= 0.0 && t <= last)) continue;
        const cplx* trace = traces.data() + (e * cube.num_channels + c) * nt;
        const auto i0 = static_cast<std::size_t>(t);
        const double frac = t - static_cast<double>(i0);
        cplx v = trace[i0];
        if (frac > 0.0) v = (1.0 - frac) * trace[i0] + frac * trace[i0 + 1];
        dst[c] += v;
      }
    }
  }
  return out;
}

RealImage envelope(const RealImage& rf) {
  require(rf.nz() >= 4, ErrorKind::InvalidArgument, "envelope needs at least 4 axial samples");
  RealImage out(rf.nx(), rf.nz());
  const auto lines = static_cast<std::ptrdiff_t>(rf.nx());
#pragma omp parallel for
  for (std::ptrdiff_t ix = 0; ix < lines; ++ix) {
    const auto a = analytic_signal(rf.line(static_cast<std::size_t>(ix)));
    auto dst = out.line(static_cast<std::size_t>(ix));
    for (std::size_t i = 0; i < a.size(); ++i) dst[i] = std::abs(a[i]);
  }
  return out;
}

RealImage envelope(const ComplexImage& iq) {
  RealImage out(iq.nx(), iq.nz());
  for (std::size_t i = 0; i < iq.size(); ++i) out.data()[i] = std::abs(iq.data()[i]);
  return out;
}

RealImage log_compress(const RealImage& envelope, double dynamic_range_db) {
  require(dynamic_range_db > 0.0, ErrorKind::InvalidArgument, "dynamic range must be positive");
  double peak = 0.0;
  for (double v : envelope.data()) {
    require(v >= 0.0, ErrorKind::InvalidArgument, "envelope must be non-negative");
    peak = std::max(peak, v);
  }
  require(peak > 0.0, ErrorKind::AllZeroEnvelope, "cannot log-compress an all-zero envelope");
  RealImage out(envelope.nx(), envelope.nz());
  for (std::size_t i = 0; i < envelope.size(); ++i) {
    const double v = envelope.data()[i];
    const double db = v > 0.0 ? 20.0 * std::log10(v / peak) : -dynamic_range_db;
    out.data()[i] = std::clamp(db, -dynamic_range_db, 0.0);
  }
  return out;
}

}  // namespace usmb::tof
