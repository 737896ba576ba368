// SPDX-License-Identifier: Apache-2.0
#include "usmb/cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include "usmb/beamform.hpp"
#include "usmb/clutter.hpp"
#include "usmb/config.hpp"
#include "usmb/io.hpp"
#include "usmb/metrics.hpp"
#include "usmb/simulator.hpp"
#include "usmb/sparse.hpp"
#include "usmb/tof.hpp"
#include "usmb/ulm.hpp"

namespace usmb::cli {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Settings shared by every subcommand.
struct Common {
  std::optional<std::string> config_file;
  std::vector<std::string> sets;
  std::map<std::string, std::string> overrides;  // flag-driven config keys
  std::map<std::string, std::string> flag_of;    // key -> flag that set it
  int threads = 0;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_file, "config file of key = value lines");
  sub->add_option("--set", c.sets, "override one config key, as key=value")->take_all();
  sub->add_option_function<std::string>(
      "--seed",
      [&c](const std::string& v) {
        c.overrides["sim.seed"] = v;
        c.flag_of["sim.seed"] = "--seed";
      },
      "seed for all random draws");
  sub->add_option("--threads", c.threads, "worker threads (0 keeps the OpenMP default)")
      ->check(CLI::NonNegativeNumber);
}

CLI::Option* bind(CLI::App* sub, Common& c, const std::string& flag, const std::string& key,
                  const std::string& help) {
  return sub->add_option_function<std::string>(
      flag,
      [&c, key, flag](const std::string& v) {
        c.overrides[key] = v;
        c.flag_of[key] = flag;
      },
      help);
}

// Numeric defaults must stay numeric (or a numeric list).
void check_types(const PipelineConfig& cfg, const std::map<std::string, std::string>& origin) {
  for (const auto& [key, entry] : cfg.entries()) {
    const auto& d = entry.default_value;
    double unused = 0.0;
    const auto res = std::from_chars(d.data(), d.data() + d.size(), unused);
    const bool numeric = res.ec == std::errc{} && res.ptr == d.data() + d.size();
    const bool boolean = d == "true" || d == "false";
    if (!numeric && !boolean) continue;
    try {
      if (boolean) {
        (void)cfg.get_bool(key);
      } else if (entry.value.find(',') != std::string::npos) {
        (void)cfg.get_list(key);
      } else {
        (void)cfg.get_double(key);
      }
    } catch (const Error& e) {
      const auto it = origin.find(key);
      throw UsageError((it == origin.end() ? std::string("config") : it->second) + ": " + e.what());
    }
  }
}

PipelineConfig resolve(const Common& c) {
  PipelineConfig cfg;
  std::map<std::string, std::string> origin;
  const auto apply = [&](const std::string& key, const std::string& value, const std::string& src) {
    try {
      cfg.set(key, value);
    } catch (const Error& e) {
      throw UsageError(src + ": " + e.what());
    }
    origin[key] = src;
  };
  if (c.config_file) {
    const std::string src = "--config " + *c.config_file;
    PipelineConfig file_cfg;
    try {
      file_cfg.merge_file(*c.config_file);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Parse) throw UsageError(src + ": " + e.what());
      throw;
    }
    for (const auto& [key, entry] : file_cfg.entries()) {
      if (entry.value != entry.default_value) apply(key, entry.value, src);
    }
  }
  for (const auto& s : c.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw UsageError("--set: expected key=value, got '" + s + "'");
    apply(s.substr(0, eq), s.substr(eq + 1), "--set " + s);
  }
  for (const auto& [k, v] : c.overrides) apply(k, v, c.flag_of.at(k));
  check_types(cfg, origin);
  if (c.threads > 0) omp_set_num_threads(c.threads);
  return cfg;
}

void write_sidecar(const fs::path& artifact, const PipelineConfig& cfg) {
  io::write_text(fs::path(artifact.string() + ".config.txt"), cfg.to_text());
}

TransducerArray make_array(const PipelineConfig& cfg, double f0, double fs) {
  return TransducerArray::linear(cfg.get_size("sim.elements"), cfg.get_double("sim.pitch"), f0,
                                 fs);
}

std::vector<TransmitEvent> make_events(const PipelineConfig& cfg, const TransducerArray& array) {
  std::vector<TransmitEvent> events;
  const auto& scheme = cfg.get("sim.scheme");
  if (scheme == "pw") {
    for (double deg : cfg.get_list("sim.angles")) {
      events.push_back(TransmitEvent::plane_wave(deg * std::numbers::pi / 180.0));
    }
  } else if (scheme == "sa") {
    for (std::size_t c = 0; c < array.num_elements(); ++c) {
      events.push_back(TransmitEvent::synthetic_aperture(array, c));
    }
  } else {
    fail(ErrorKind::Parse, "sim.scheme must be pw or sa, got '" + scheme + "'");
  }
  return events;
}

ImagingGrid make_grid(const PipelineConfig& cfg) {
  return ImagingGrid::uniform(cfg.get_double("tof.x_min"), cfg.get_double("tof.x_max"),
                              cfg.get_size("tof.nx"), cfg.get_double("tof.z_min"),
                              cfg.get_double("tof.z_max"), cfg.get_size("tof.nz"));
}

sim::PulseModel make_pulse(const PipelineConfig& cfg) {
  sim::PulseModel p;
  p.center_frequency = cfg.get_double("sim.f0");
  p.fractional_bandwidth = cfg.get_double("sim.bandwidth");
  return p;
}

ScattererField cyst_from_config(const PipelineConfig& cfg) {
  return sim::cyst_phantom(cfg.get_size("sim.scatterers"), cfg.get_double("sim.x_min"),
                           cfg.get_double("sim.x_max"), cfg.get_double("sim.z_min"),
                           cfg.get_double("sim.z_max"),
                           {cfg.get_double("sim.cyst_x"), cfg.get_double("sim.cyst_z")},
                           cfg.get_double("sim.cyst_radius"),
                           static_cast<std::uint64_t>(cfg.get_int("sim.seed")));
}

RfDataCube simulate_from_config(const PipelineConfig& cfg, const ScattererField& field) {
  const auto array = make_array(cfg, cfg.get_double("sim.f0"), cfg.get_double("sim.fs"));
  const auto events = make_events(cfg, array);
  const auto pulse = make_pulse(cfg);
  sim::SimulationParams params;
  params.speed_of_sound = cfg.get_double("sim.speed");
  params.noise_std = cfg.get_double("sim.noise_std");
  params.seed = static_cast<std::uint64_t>(cfg.get_int("sim.seed"));
  params.num_samples = cfg.get_size("sim.samples");
  if (params.num_samples == 0) {
    params.num_samples = sim::required_samples(array, events, field, pulse, params.speed_of_sound);
  }
  return sim::simulate(array, events, field, pulse, params);
}

ApodizationKind apod_kind(const std::string& name) {
  if (name == "rect") return ApodizationKind::Rectangular;
  if (name == "hanning") return ApodizationKind::Hanning;
  if (name == "hamming") return ApodizationKind::Hamming;
  fail(ErrorKind::Parse, "bf.apod must be rect, hanning or hamming, got '" + name + "'");
}

bf::CovarianceConfig covariance_config(const PipelineConfig& cfg) {
  bf::CovarianceConfig c;
  c.subaperture_length = cfg.get_size("bf.sub_L");
  c.axial_half_window = cfg.get_size("bf.K");
  c.loading = cfg.get_double("bf.eps");
  return c;
}

BeamformedImage beamform_single(const FocusedTensor& f, const std::string& method,
                                const PipelineConfig& cfg) {
  const auto apod = ApodizationWindow::make(apod_kind(cfg.get("bf.apod")), f.num_channels());
  if (method == "das") return bf::das(f, apod);
  if (method == "mv") return bf::mv(f, covariance_config(cfg));
  if (method == "wiener") return bf::wiener(f, covariance_config(cfg));
  if (method == "cf") return bf::cf_weighted_das(f, apod);
  if (method == "imap") return bf::imap(f, static_cast<int>(cfg.get_int("bf.iters")));
  fail(ErrorKind::Parse, "bf.method must be das, mv, wiener, cf or imap, got '" + method + "'");
}

// Events stacked, beamformed one by one, then compounded.
BeamformedImage beamform_cube(const RfDataCube& cube, const PipelineConfig& cfg,
                              const std::string& method) {
  const auto array = make_array(cfg, cube.center_frequency, cube.fs);
  require(array.num_elements() == cube.num_channels, ErrorKind::DimensionMismatch,
          "sim.elements (" + std::to_string(array.num_elements()) +
              ") does not match the cube channel count (" + std::to_string(cube.num_channels) +
              ")");
  const auto grid = make_grid(cfg);
  const auto delays = tof::compute_delays(array, cube.events, grid, cube.speed_of_sound);
  tof::FocusOptions opts;
  opts.compounding = tof::Compounding::Stack;
  opts.analytic = cfg.get_bool("tof.analytic");
  const auto focused = tof::focus(cube, delays, grid, opts);
  if (cube.num_events == 1) return beamform_single(focused, method, cfg);
  std::vector<BeamformedImage> per_event;
  for (std::size_t e = 0; e < cube.num_events; ++e) {
    per_event.push_back(beamform_single(focused.select_event(e), method, cfg));
  }
  const auto& mode = cfg.get("bf.compound");
  require(mode == "mean" || mode == "mv", ErrorKind::Parse,
          "bf.compound must be mean or mv, got '" + mode + "'");
  return bf::compound(per_event, mode == "mv" ? bf::CompoundMode::MV : bf::CompoundMode::Mean,
                      covariance_config(cfg));
}

void write_image_outputs(const fs::path& prefix, BeamformedImage& img, double dyn_range) {
  img.compress(dyn_range);
  io::write_uim1(prefix.string() + ".uim", img.envelope);
  io::write_pgm(prefix.string() + ".pgm", *img.log_db, -dyn_range, 0.0);
}

metrics::Region parse_region(const std::string& flag, const std::string& text) {
  std::vector<double> v;
  std::stringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw UsageError(flag + ": expected x0,z0,x1,z1 in meters, got '" + text + "'");
    }
  }
  if (v.size() != 4) throw UsageError(flag + ": expected x0,z0,x1,z1 in meters, got '" + text + "'");
  return {v[0], v[1], v[2], v[3]};
}

// Cyst interior box and a same-size speckle box above it.
std::pair<metrics::Region, metrics::Region> cyst_regions(const PipelineConfig& cfg) {
  const double cx = cfg.get_double("sim.cyst_x");
  const double cz = cfg.get_double("sim.cyst_z");
  const double h = 0.7 * cfg.get_double("sim.cyst_radius");
  const double bz = cz - 2.5 * cfg.get_double("sim.cyst_radius");
  return {{cx - h, cz - h, cx + h, cz + h}, {cx - h, bz - h, cx + h, bz + h}};
}

// --------------------------------------------------------------------------
// Subcommands

int cmd_simulate(const Common& c, const std::string& out, const std::optional<std::string>& scat,
                 std::ostream& os) {
  auto cfg = resolve(c);
  const auto field =
      scat ? io::parse_scatterers([&] {
        const auto b = io::read_file(*scat);
        return std::string(b.begin(), b.end());
      }())
           : cyst_from_config(cfg);
  const auto cube = simulate_from_config(cfg, field);
  io::write_urf1(out, cube);
  write_sidecar(out, cfg);
  os << "wrote " << out << " (" << cube.num_events << " x " << cube.num_channels << " x "
     << cube.num_samples << ")\n";
  return kExitOk;
}

int cmd_beamform(const Common& c, const std::string& in, const std::string& out,
                 std::ostream& os) {
  auto cfg = resolve(c);
  auto cube = io::read_urf1(in);
  const auto array = make_array(cfg, cube.center_frequency, cube.fs);
  cube.events = make_events(cfg, array);
  require(cube.events.size() == cube.num_events, ErrorKind::DimensionMismatch,
          "configured transmit events (" + std::to_string(cube.events.size()) +
              ") do not match the file's E (" + std::to_string(cube.num_events) + ")");
  validate(cube);
  auto img = beamform_cube(cube, cfg, cfg.get("bf.method"));
  write_image_outputs(out, img, cfg.get_double("bf.dyn_range"));
  write_sidecar(out, cfg);
  os << "wrote " << out << ".uim and " << out << ".pgm\n";
  return kExitOk;
}

int cmd_recover(const Common& c, const std::string& bins_file, const std::string& out,
                std::ostream& os) {
  auto cfg = resolve(c);
  const auto bytes = io::read_file(bins_file);
  const auto rows = io::parse_table(std::string(bytes.begin(), bytes.end()));
  sparse::ScanlineModel model;
  model.length = cfg.get_size("sparse.length");
  std::vector<cplx> y;
  for (const auto& r : rows) {
    require(r.size() == 3 || r.size() == 5, ErrorKind::Parse,
            "bin lines hold: bin y_re y_im [h_re h_im]");
    require(r[0] >= 0.0 && r[0] == std::floor(r[0]), ErrorKind::Parse,
            "bin index must be a non-negative integer");
    model.bins.push_back(static_cast<std::size_t>(r[0]));
    y.emplace_back(r[1], r[2]);
    model.pulse_spectrum.push_back(r.size() == 5 ? cplx{r[3], r[4]} : cplx{1.0, 0.0});
  }
  sparse::SolverSettings s{static_cast<int>(cfg.get_int("sparse.max_iters")),
                           cfg.get_double("sparse.tol")};
  const auto x = sparse::recover_scanline(model, y, cfg.get_double("sparse.lambda"), s);
  std::vector<std::vector<std::string>> table;
  for (std::size_t i = 0; i < x.size(); ++i) {
    table.push_back({std::to_string(i), io::format_number(x[i])});
  }
  io::write_text(out, io::format_csv({"index", "value"}, table));
  write_sidecar(out, cfg);
  os << "wrote " << out << "\n";
  return kExitOk;
}

int cmd_deconvolve(const Common& c, const std::string& in, const std::string& psf_file,
                   const std::string& out, std::ostream& os) {
  auto cfg = resolve(c);
  const auto frames = io::read_uim1(in);
  require(frames.size() == 1, ErrorKind::DimensionMismatch, "deconvolve takes a single image");
  const auto bytes = io::read_file(psf_file);
  const auto psf = io::parse_kernel(std::string(bytes.begin(), bytes.end()));
  sparse::SolverSettings s{static_cast<int>(cfg.get_int("sparse.max_iters")),
                           cfg.get_double("sparse.tol")};
  const auto x = sparse::deconvolve(frames.front(), psf, cfg.get_double("sparse.lambda"), s);
  io::write_uim1(out + ".uim", x);
  io::write_pgm_autoscale(out + ".pgm", x);
  write_sidecar(out, cfg);
  os << "wrote " << out << ".uim and " << out << ".pgm\n";
  return kExitOk;
}

int cmd_clutter(const Common& c, const std::string& in, const std::string& out,
                std::ostream& os) {
  auto cfg = resolve(c);
  const auto frames = io::read_uim1(in);
  std::vector<ComplexImage> cf;
  for (const auto& f : frames) {
    ComplexImage z(f.nx(), f.nz());
    for (std::size_t i = 0; i < f.size(); ++i) z.data()[i] = f.data()[i];
    cf.push_back(std::move(z));
  }
  const auto y = clutter::build_casorati(cf);
  numerics::CMatrix tissue, blood;
  const auto& method = cfg.get("clutter.method");
  if (method == "svt") {
    double l1 = cfg.get_double("clutter.lambda1");
    if (l1 <= 0.0) l1 = clutter::default_lambda1(y.data);
    tissue = clutter::svt(y.data, l1);
    blood = y.data - tissue;
  } else if (method == "rpca") {
    clutter::RpcaOptions o;
    o.lambda1 = cfg.get_double("clutter.lambda1");
    o.lambda2 = cfg.get_double("clutter.lambda2");
    o.mu1 = cfg.get_double("clutter.mu1");
    o.mu2 = cfg.get_double("clutter.mu2");
    o.max_iters = static_cast<int>(cfg.get_int("clutter.iters"));
    o.tol = cfg.get_double("clutter.tol");
    auto r = clutter::rpca(y.data, o);
    tissue = std::move(r.tissue);
    blood = std::move(r.blood);
    os << "rpca: " << r.iterations << " iterations" << (r.converged ? "" : " (not converged)")
       << "\n";
  } else {
    fail(ErrorKind::Parse, "clutter.method must be svt or rpca, got '" + method + "'");
  }
  const auto real_frames = [&](const numerics::CMatrix& m) {
    std::vector<RealImage> seq;
    for (const auto& f : clutter::unbuild_casorati({m, y.nx, y.nz})) {
      RealImage r(f.nx(), f.nz());
      for (std::size_t i = 0; i < f.size(); ++i) r.data()[i] = f.data()[i].real();
      seq.push_back(std::move(r));
    }
    return seq;
  };
  io::write_uim1_sequence(out + "_tissue.uim", real_frames(tissue));
  io::write_uim1_sequence(out + "_blood.uim", real_frames(blood));
  const auto doppler = clutter::power_doppler(blood, y.nx, y.nz);
  io::write_uim1(out + "_doppler.uim", doppler);
  io::write_pgm_autoscale(out + "_doppler.pgm", doppler);
  write_sidecar(out, cfg);
  os << "wrote " << out << "_{tissue,blood,doppler}\n";
  return kExitOk;
}

int cmd_ulm(const Common& c, const std::string& in, const std::string& out, std::ostream& os) {
  auto cfg = resolve(c);
  const auto frames = io::read_uim1(in);
  const auto factor = cfg.get_size("ulm.factor");
  require(factor >= 1, ErrorKind::Parse, "ulm.factor must be >= 1");
  const auto& method = cfg.get("ulm.method");
  require(method == "sparse" || method == "centroid", ErrorKind::Parse,
          "ulm.method must be sparse or centroid, got '" + method + "'");
  const auto psf = ulm::gaussian_psf(cfg.get_double("ulm.psf_sigma"));
  const double lambda = cfg.get_double("ulm.lambda");
  const double thr = cfg.get_double("ulm.threshold");
  const auto radius = cfg.get_size("ulm.radius");
  sparse::SolverSettings s{static_cast<int>(cfg.get_int("ulm.iters")), cfg.get_double("ulm.tol")};

  std::vector<ulm::LocalizationSet> sets(frames.size());
  std::vector<std::string> errors(frames.size());
  const auto n = static_cast<std::ptrdiff_t>(frames.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    const auto& f = frames[static_cast<std::size_t>(t)];
    auto& set = sets[static_cast<std::size_t>(t)];
    try {
      if (method == "sparse") {
        set.detections = ulm::detect_centroids(ulm::localize_sparse(f, psf, lambda, factor, s),
                                               thr, radius);
      } else {
        for (const auto& d : ulm::detect_centroids(f, thr, radius)) {
          set.detections.push_back(ulm::lr_to_hr(d, factor));
        }
      }
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(t)] = e.what();
    }
  }
  for (std::size_t t = 0; t < errors.size(); ++t) {
    require(errors[t].empty(), ErrorKind::InvalidArgument,
            "frame " + std::to_string(t) + ": " + errors[t]);
  }
  const std::size_t hr_nx = frames.front().nx() * factor;
  const std::size_t hr_nz = frames.front().nz() * factor;
  const auto density = ulm::accumulate(sets, hr_nx, hr_nz);
  io::write_uim1(out + "_density.uim", density);
  io::write_pgm_autoscale(out + "_density.pgm", density);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t t = 0; t < sets.size(); ++t) {
    for (const auto& d : sets[t].detections) {
      rows.push_back({std::to_string(t), io::format_number(d.x), io::format_number(d.z),
                      io::format_number(d.intensity)});
    }
  }
  io::write_text(out + "_detections.csv", io::format_csv({"frame", "x", "z", "intensity"}, rows));
  write_sidecar(out, cfg);
  os << "wrote " << out << "_density.{uim,pgm} and " << out << "_detections.csv (" << rows.size()
     << " detections)\n";
  return kExitOk;
}

int cmd_metrics(const Common& c, const std::string& in, const std::optional<std::string>& ra,
                const std::optional<std::string>& rb, const std::optional<double>& fwhm_depth,
                const std::optional<std::string>& out, std::ostream& os) {
  auto cfg = resolve(c);
  if (ra.has_value() != rb.has_value()) {
    throw UsageError("--region-a and --region-b must be given together");
  }
  const auto frames = io::read_uim1(in);
  require(frames.size() == 1, ErrorKind::DimensionMismatch, "metrics takes a single image");
  const auto& img = frames.front();
  const auto grid = make_grid(cfg);
  require(img.nx() == grid.nx() && img.nz() == grid.nz(), ErrorKind::GridMismatch,
          "image shape does not match tof.nx x tof.nz");
  std::vector<std::vector<std::string>> rows;
  if (ra) {
    const auto a = parse_region("--region-a", *ra);
    const auto b = parse_region("--region-b", *rb);
    rows.push_back({"contrast_db", "a_vs_b", io::format_number(metrics::contrast_db(img, grid, a, b))});
    rows.push_back({"cnr", "a_vs_b", io::format_number(metrics::cnr(img, grid, a, b))});
  }
  if (fwhm_depth) {
    std::size_t iz = 0;
    for (std::size_t k = 1; k < grid.nz(); ++k) {
      if (std::abs(grid.axial()[k] - *fwhm_depth) < std::abs(grid.axial()[iz] - *fwhm_depth)) iz = k;
    }
    std::vector<double> profile(grid.nx());
    for (std::size_t ix = 0; ix < grid.nx(); ++ix) profile[ix] = img(ix, iz);
    const double dx = grid.nx() > 1 ? grid.lateral()[1] - grid.lateral()[0] : 1.0;
    rows.push_back({"fwhm_lateral", "z=" + io::format_number(grid.axial()[iz]),
                    io::format_number(metrics::fwhm(profile, dx))});
  }
  const auto csv = io::format_csv({"metric", "name", "value"}, rows);
  os << csv;
  const std::string path = out.value_or("metrics.csv");
  io::write_text(path, csv);
  write_sidecar(path, cfg);
  return kExitOk;
}

int cmd_demo(const Common& c, const std::string& out_dir, std::ostream& os) {
  auto cfg = resolve(c);
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());

  const auto field = cyst_from_config(cfg);
  const auto cube = simulate_from_config(cfg, field);
  io::write_urf1(dir / "rf.urf", cube);

  const auto [cyst, background] = cyst_regions(cfg);
  const double dr = cfg.get_double("bf.dyn_range");
  std::vector<std::vector<std::string>> rows;
  for (const std::string method : {"das", "mv", "cf", "imap"}) {
    auto img = beamform_cube(cube, cfg, method);
    write_image_outputs(dir / method, img, dr);
    const auto grid = make_grid(cfg);
    rows.push_back({"contrast_db", method,
                    io::format_number(metrics::contrast_db(img.envelope, grid, background, cyst))});
    rows.push_back(
        {"cnr", method, io::format_number(metrics::cnr(img.envelope, grid, background, cyst))});
  }
  io::write_text(dir / "metrics.csv", io::format_csv({"metric", "name", "value"}, rows));
  io::write_text(dir / "demo.config.txt", cfg.to_text());
  os << io::format_csv({"metric", "name", "value"}, rows);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"usmb: model-based ultrasound signal processing"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "expand all help");

  Common common;
  std::string in, output;
  std::optional<std::string> scatterers, region_a, region_b, csv_out;
  std::optional<double> fwhm_depth;
  std::string bins, psf;

  auto* simulate = app.add_subcommand("simulate", "simulate channel data and write URF1");
  add_common(simulate, common);
  simulate->add_option("--out", output, "output URF1 file")->default_val("sim.urf");
  simulate->add_option("--scatterers", scatterers, "text file of x z amplitude lines");
  bind(simulate, common, "--angles", "sim.angles", "comma-separated plane-wave angles (deg)");
  bind(simulate, common, "--noise", "sim.noise_std", "channel noise standard deviation");
  bind(simulate, common, "--samples", "sim.samples", "samples per trace (0 = automatic)");
  bind(simulate, common, "--elements", "sim.elements", "array element count");

  auto* beamform = app.add_subcommand("beamform", "beamform a URF1 file");
  add_common(beamform, common);
  beamform->add_option("--in", in, "input URF1 file")->required();
  beamform->add_option("--out", output, "output prefix (.uim and .pgm)")->default_val("image");
  bind(beamform, common, "--method", "bf.method", "das, mv, wiener, cf or imap")
      ->check(CLI::IsMember({"das", "mv", "wiener", "cf", "imap"}));
  bind(beamform, common, "--apod", "bf.apod", "rect, hanning or hamming")
      ->check(CLI::IsMember({"rect", "hanning", "hamming"}));
  bind(beamform, common, "--iters", "bf.iters", "iMAP iterations")->check(CLI::PositiveNumber);
  bind(beamform, common, "--sub-L", "bf.sub_L", "MV subaperture length (0 = C/2)")
      ->check(CLI::NonNegativeNumber);
  bind(beamform, common, "--eps", "bf.eps", "MV diagonal loading")->check(CLI::NonNegativeNumber);
  bind(beamform, common, "--dyn-range", "bf.dyn_range", "display dynamic range (dB)")
      ->check(CLI::PositiveNumber);

  auto* recover = app.add_subcommand("recover", "sparse scanline recovery from DFT bins");
  add_common(recover, common);
  recover->add_option("--bins", bins, "text file of bin y_re y_im [h_re h_im] lines")->required();
  recover->add_option("--out", output, "output CSV")->default_val("recover.csv");
  bind(recover, common, "--lambda", "sparse.lambda", "l1 weight")->check(CLI::PositiveNumber);
  bind(recover, common, "--length", "sparse.length", "scanline length N")
      ->check(CLI::PositiveNumber);

  auto* deconv = app.add_subcommand("deconvolve", "l1 deconvolution of a UIM1 image");
  add_common(deconv, common);
  deconv->add_option("--in", in, "input UIM1 image")->required();
  deconv->add_option("--psf", psf, "text kernel, one row per lateral index")->required();
  deconv->add_option("--out", output, "output prefix (.uim and .pgm)")->default_val("deconvolved");
  bind(deconv, common, "--lambda", "sparse.lambda", "l1 weight")->check(CLI::PositiveNumber);

  auto* clut = app.add_subcommand("clutter", "SVT or RPCA clutter filtering of a UIM1 sequence");
  add_common(clut, common);
  clut->add_option("--in", in, "input UIM1 sequence")->required();
  clut->add_option("--out", output, "output prefix")->default_val("clutter");
  bind(clut, common, "--method", "clutter.method", "svt or rpca")
      ->check(CLI::IsMember({"svt", "rpca"}));
  bind(clut, common, "--lambda1", "clutter.lambda1", "nuclear-norm weight (0 = default)")
      ->check(CLI::NonNegativeNumber);
  bind(clut, common, "--lambda2", "clutter.lambda2", "mixed-norm weight (0 = default)")
      ->check(CLI::NonNegativeNumber);
  bind(clut, common, "--iters", "clutter.iters", "iteration cap")->check(CLI::PositiveNumber);

  auto* ulm_cmd = app.add_subcommand("ulm", "microbubble localization and density mapping");
  add_common(ulm_cmd, common);
  ulm_cmd->add_option("--frames", in, "input UIM1 sequence of LR frames")->required();
  ulm_cmd->add_option("--out", output, "output prefix")->default_val("ulm");
  bind(ulm_cmd, common, "--lambda", "ulm.lambda", "l1 weight")->check(CLI::PositiveNumber);
  bind(ulm_cmd, common, "--factor", "ulm.factor", "HR refinement factor")
      ->check(CLI::PositiveNumber);
  bind(ulm_cmd, common, "--method", "ulm.method", "sparse or centroid")
      ->check(CLI::IsMember({"sparse", "centroid"}));

  auto* met = app.add_subcommand("metrics", "image-quality metrics of a UIM1 envelope");
  add_common(met, common);
  met->add_option("--in", in, "input UIM1 envelope on the tof.* grid")->required();
  met->add_option("--region-a", region_a, "x0,z0,x1,z1 in meters");
  met->add_option("--region-b", region_b, "x0,z0,x1,z1 in meters");
  met->add_option("--fwhm-depth", fwhm_depth, "depth (m) of the lateral FWHM profile");
  met->add_option("--out", csv_out, "also write the CSV here");

  auto* demo = app.add_subcommand("demo", "cyst phantom through DAS, MV, CF and iMAP");
  add_common(demo, common);
  demo->add_option("--out", output, "output directory")->default_val("demo_out");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(common, output, scatterers, out);
    if (beamform->parsed()) return cmd_beamform(common, in, output, out);
    if (recover->parsed()) return cmd_recover(common, bins, output, out);
    if (deconv->parsed()) return cmd_deconvolve(common, in, psf, output, out);
    if (clut->parsed()) return cmd_clutter(common, in, output, out);
    if (ulm_cmd->parsed()) return cmd_ulm(common, in, output, out);
    if (met->parsed()) return cmd_metrics(common, in, region_a, region_b, fwhm_depth, csv_out, out);
    if (demo->parsed()) return cmd_demo(common, output, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace usmb::cli
