// SPDX-License-Identifier: Apache-2.0
#include "usmb/config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "usmb/error.hpp"
#include "usmb/io.hpp"

namespace usmb {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void PipelineConfig::declare(const std::string& key, const std::string& value,
                             const std::string& doc) {
  entries_[key] = {value, value, doc};
}

PipelineConfig::PipelineConfig() {
  declare("sim.seed", "0", "seed for every random draw");
  declare("sim.elements", "64", "number of array elements C");
  declare("sim.pitch", "1.54e-4", "element pitch in meters");
  declare("sim.f0", "5e6", "center frequency in Hz");
  declare("sim.fs", "4e7", "sampling frequency in Hz");
  declare("sim.bandwidth", "0.6", "fractional bandwidth of the Gaussian pulse");
  declare("sim.speed", "1540", "speed of sound in m/s");
  declare("sim.samples", "0", "samples per trace; 0 sizes the window to the deepest echo");
  declare("sim.noise_std", "0", "standard deviation of additive channel noise");
  declare("sim.scheme", "pw", "transmit scheme: pw (plane waves) or sa (synthetic aperture)");
  declare("sim.angles", "0", "comma-separated plane-wave angles in degrees");
  declare("sim.scatterers", "500", "speckle scatterer count for the cyst phantom");
  declare("sim.cyst_x", "0", "cyst center lateral position in meters");
  declare("sim.cyst_z", "0.03", "cyst center depth in meters");
  declare("sim.cyst_radius", "0.002", "cyst radius in meters");
  declare("sim.x_min", "-0.006", "phantom lateral extent, minimum");
  declare("sim.x_max", "0.006", "phantom lateral extent, maximum");
  declare("sim.z_min", "0.022", "phantom depth extent, minimum");
  declare("sim.z_max", "0.038", "phantom depth extent, maximum");
  declare("tof.x_min", "-0.005", "image grid lateral minimum in meters");
  declare("tof.x_max", "0.005", "image grid lateral maximum in meters");
  declare("tof.nx", "81", "image grid lateral pixel count");
  declare("tof.z_min", "0.024", "image grid depth minimum in meters");
  declare("tof.z_max", "0.036", "image grid depth maximum in meters");
  declare("tof.nz", "157", "image grid axial pixel count");
  declare("tof.analytic", "true", "focus the analytic signal (IQ) instead of raw RF");
  declare("bf.method", "das", "beamformer: das, mv, wiener, cf or imap");
  declare("bf.apod", "rect", "receive apodization: rect, hanning or hamming");
  declare("bf.iters", "2", "iMAP iterations");
  declare("bf.sub_L", "0", "MV subaperture length; 0 selects C/2");
  declare("bf.K", "2", "MV axial half window");
  declare("bf.eps", "0.01", "MV diagonal loading relative to trace/L");
  declare("bf.dyn_range", "60", "display dynamic range in dB");
  declare("bf.compound", "mean", "multi-transmit combination: mean or mv");
  declare("sparse.lambda", "0.1", "l1 weight");
  declare("sparse.max_iters", "5000", "ISTA iteration cap");
  declare("sparse.tol", "1e-8", "ISTA relative-change tolerance");
  declare("sparse.length", "128", "scanline length N for recover");
  declare("clutter.method", "rpca", "svt or rpca");
  declare("clutter.lambda1", "0", "nuclear-norm weight; 0 selects s1/sqrt(max(NM,T))");
  declare("clutter.lambda2", "0", "mixed-norm weight; 0 selects lambda1/2");
  declare("clutter.mu1", "0.5", "tissue step size");
  declare("clutter.mu2", "0.5", "blood step size");
  declare("clutter.iters", "500", "RPCA iteration cap");
  declare("clutter.tol", "1e-6", "RPCA relative-change tolerance");
  declare("ulm.method", "sparse", "sparse or centroid");
  declare("ulm.lambda", "0.1", "l1 weight for sparse localization");
  declare("ulm.factor", "4", "HR grid refinement factor");
  declare("ulm.psf_sigma", "2", "Gaussian PSF sigma in HR pixels");
  declare("ulm.iters", "300", "ISTA iteration cap per frame");
  declare("ulm.tol", "1e-5", "ISTA relative-change tolerance per frame");
  declare("ulm.threshold", "0.1", "detection threshold relative to the frame maximum");
  declare("ulm.radius", "2", "detection window radius in pixels");
}

void PipelineConfig::set(const std::string& key, const std::string& value) {
  const auto it = entries_.find(key);
  require(it != entries_.end(), ErrorKind::Parse, "unknown config key '" + key + "'");
  it->second.value = value;
}

const std::string& PipelineConfig::get(const std::string& key) const {
  const auto it = entries_.find(key);
  require(it != entries_.end(), ErrorKind::Parse, "unknown config key '" + key + "'");
  return it->second.value;
}

double PipelineConfig::get_double(const std::string& key) const {
  const auto& s = get(key);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  require(res.ec == std::errc{} && res.ptr == s.data() + s.size() && std::isfinite(v),
          ErrorKind::Parse, key + ": expected a number, got '" + s + "'");
  return v;
}

std::int64_t PipelineConfig::get_int(const std::string& key) const {
  const auto& s = get(key);
  std::int64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  require(res.ec == std::errc{} && res.ptr == s.data() + s.size(), ErrorKind::Parse,
          key + ": expected an integer, got '" + s + "'");
  return v;
}

std::size_t PipelineConfig::get_size(const std::string& key) const {
  const auto v = get_int(key);
  require(v >= 0, ErrorKind::Parse, key + ": expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

bool PipelineConfig::get_bool(const std::string& key) const {
  const auto& s = get(key);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  fail(ErrorKind::Parse, key + ": expected true or false, got '" + s + "'");
}

std::vector<double> PipelineConfig::get_list(const std::string& key) const {
  std::vector<double> out;
  std::stringstream in(get(key));
  std::string tok;
  while (std::getline(in, tok, ',')) {
    tok = trim(tok);
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    require(!tok.empty() && res.ec == std::errc{} && res.ptr == tok.data() + tok.size(),
            ErrorKind::Parse, key + ": bad list element '" + tok + "'");
    out.push_back(v);
  }
  require(!out.empty(), ErrorKind::Parse, key + ": empty list");
  return out;
}

void PipelineConfig::merge_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    require(eq != std::string::npos, ErrorKind::Parse,
            "config line " + std::to_string(lineno) + ": expected key = value");
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void PipelineConfig::merge_file(const std::string& path) {
  const auto bytes = io::read_file(path);
  merge_text(std::string(bytes.begin(), bytes.end()));
}

std::string PipelineConfig::to_text() const {
  std::string out;
  for (const auto& [key, e] : entries_) {
    out += "# " + e.description + " (default " + e.default_value + ")\n";
    out += key + " = " + e.value + "\n";
  }
  return out;
}

}  // namespace usmb
