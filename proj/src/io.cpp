// SPDX-License-Identifier: Apache-2.0
#include "usmb/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace usmb::io {

namespace {

constexpr std::size_t kUrfHeader = 4 + 3 * 4 + 3 * 8;
constexpr std::size_t kUimHeader = 4 + 2 * 4;
constexpr std::size_t kUimSeqHeader = 4 + 3 * 4;

template <typename T>
void put(Bytes& out, T value) {
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
  out.insert(out.end(), raw, raw + sizeof(T));
}

template <typename T>
T get(std::span<const std::uint8_t> in, std::size_t offset) {
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, in.data() + offset, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
  T value;
  std::memcpy(&value, raw, sizeof(T));
  return value;
}

void put_magic(Bytes& out, const char* magic) { out.insert(out.end(), magic, magic + 4); }

void check_magic(std::span<const std::uint8_t> in, const char* magic) {
  require(in.size() >= 4, ErrorKind::TruncatedPayload,
          "truncated payload: file shorter than the 4-byte magic");
  require(std::memcmp(in.data(), magic, 4) == 0, ErrorKind::BadMagic,
          std::string("expected magic \"") + magic + "\"");
}

std::string truncated(std::size_t expected, std::size_t got) {
  return "truncated payload: expected " + std::to_string(expected) + " bytes, got " +
         std::to_string(got);
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
  require(v <= 0xFFFFFFFFu, ErrorKind::InvalidArgument, std::string(what) + " exceeds u32");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

Bytes encode_urf1(const RfDataCube& cube) {
  require(cube.samples.size() == cube.num_events * cube.num_channels * cube.num_samples,
          ErrorKind::DimensionMismatch, "cube sample count does not match its dimensions");
  Bytes out;
  out.reserve(kUrfHeader + 4 * cube.samples.size());
  put_magic(out, "URF1");
  put(out, checked_u32(cube.num_events, "E"));
  put(out, checked_u32(cube.num_channels, "C"));
  put(out, checked_u32(cube.num_samples, "Nt"));
  put(out, cube.fs);
  put(out, cube.speed_of_sound);
  put(out, cube.center_frequency);
  for (double v : cube.samples) put(out, static_cast<float>(v));
  return out;
}

RfDataCube decode_urf1(std::span<const std::uint8_t> bytes) {
  check_magic(bytes, "URF1");
  require(bytes.size() >= kUrfHeader, ErrorKind::TruncatedPayload,
          truncated(kUrfHeader, bytes.size()));
  RfDataCube cube;
  cube.num_events = get<std::uint32_t>(bytes, 4);
  cube.num_channels = get<std::uint32_t>(bytes, 8);
  cube.num_samples = get<std::uint32_t>(bytes, 12);
  cube.fs = get<double>(bytes, 16);
  cube.speed_of_sound = get<double>(bytes, 24);
  cube.center_frequency = get<double>(bytes, 32);
  const std::size_t count = cube.num_events * cube.num_channels * cube.num_samples;
  const std::size_t expected = kUrfHeader + 4 * count;
  require(bytes.size() >= expected, ErrorKind::TruncatedPayload, truncated(expected, bytes.size()));
  require(bytes.size() == expected, ErrorKind::DimensionMismatch,
          "trailing bytes after URF1 payload");
  cube.samples.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    cube.samples[i] = get<float>(bytes, kUrfHeader + 4 * i);
  }
  return cube;
}

Bytes encode_uim1(const RealImage& image) {
  Bytes out;
  out.reserve(kUimHeader + 4 * image.size());
  put_magic(out, "UIM1");
  put(out, checked_u32(image.nx(), "Rx"));
  put(out, checked_u32(image.nz(), "Rz"));
  for (double v : image.data()) put(out, static_cast<float>(v));
  return out;
}

Bytes encode_uim1_sequence(std::span<const RealImage> frames) {
  require(!frames.empty(), ErrorKind::InvalidArgument, "empty frame sequence");
  const auto& first = frames.front();
  Bytes out;
  out.reserve(kUimSeqHeader + 4 * first.size() * frames.size());
  put_magic(out, "UIM1");
  put(out, checked_u32(first.nx(), "Rx"));
  put(out, checked_u32(first.nz(), "Rz"));
  put(out, checked_u32(frames.size(), "T"));
  for (const auto& f : frames) {
    require(f.same_shape(first), ErrorKind::ShapeMismatch, "frames differ in shape");
    for (double v : f.data()) put(out, static_cast<float>(v));
  }
  return out;
}

std::vector<RealImage> decode_uim1(std::span<const std::uint8_t> bytes) {
  check_magic(bytes, "UIM1");
  require(bytes.size() >= kUimHeader, ErrorKind::TruncatedPayload,
          truncated(kUimHeader, bytes.size()));
  const std::size_t nx = get<std::uint32_t>(bytes, 4);
  const std::size_t nz = get<std::uint32_t>(bytes, 8);
  const std::size_t pixels = nx * nz;
  std::size_t frames = 1;
  std::size_t offset = kUimHeader;
  if (bytes.size() != kUimHeader + 4 * pixels) {
    require(bytes.size() >= kUimSeqHeader, ErrorKind::TruncatedPayload,
            truncated(kUimHeader + 4 * pixels, bytes.size()));
    frames = get<std::uint32_t>(bytes, 12);
    offset = kUimSeqHeader;
    const std::size_t expected = kUimSeqHeader + 4 * pixels * frames;
    require(bytes.size() >= expected, ErrorKind::TruncatedPayload,
            truncated(expected, bytes.size()));
    require(bytes.size() == expected, ErrorKind::DimensionMismatch,
            "UIM1 size matches neither the single-image nor the sequence layout");
  }
  std::vector<RealImage> out;
  out.reserve(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    RealImage img(nx, nz);
    for (std::size_t i = 0; i < pixels; ++i) {
      img.data()[i] = get<float>(bytes, offset + 4 * (t * pixels + i));
    }
    out.push_back(std::move(img));
  }
  return out;
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  require(static_cast<bool>(out), ErrorKind::Io, "write failed for " + path.string());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_file(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

RfDataCube read_urf1(const std::filesystem::path& path) { return decode_urf1(read_file(path)); }

void write_urf1(const std::filesystem::path& path, const RfDataCube& cube) {
  write_file(path, encode_urf1(cube));
}

std::vector<RealImage> read_uim1(const std::filesystem::path& path) {
  return decode_uim1(read_file(path));
}

void write_uim1(const std::filesystem::path& path, const RealImage& image) {
  write_file(path, encode_uim1(image));
}

void write_uim1_sequence(const std::filesystem::path& path, std::span<const RealImage> frames) {
  write_file(path, encode_uim1_sequence(frames));
}

Bytes encode_pgm(const RealImage& image, double lo, double hi) {
  require(image.size() > 0, ErrorKind::InvalidArgument, "cannot write an empty image");
  const std::string header =
      "P5\n" + std::to_string(image.nx()) + " " + std::to_string(image.nz()) + "\n255\n";
  Bytes out(header.begin(), header.end());
  const double span = hi > lo ? hi - lo : 1.0;
  for (std::size_t iz = 0; iz < image.nz(); ++iz) {
    for (std::size_t ix = 0; ix < image.nx(); ++ix) {
      const double v = image(ix, iz);
      const double u = std::isfinite(v) ? std::clamp((v - lo) / span, 0.0, 1.0) : 0.0;
      out.push_back(static_cast<std::uint8_t>(std::lround(u * 255.0)));
    }
  }
  return out;
}

void write_pgm(const std::filesystem::path& path, const RealImage& image, double lo, double hi) {
  write_file(path, encode_pgm(image, lo, hi));
}

void write_pgm_autoscale(const std::filesystem::path& path, const RealImage& image) {
  const auto [mn, mx] = std::minmax_element(image.data().begin(), image.data().end());
  write_pgm(path, image, *mn, *mx);
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_csv(const std::vector<std::string>& header,
                       const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  const auto emit = [&out](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      const auto& f = fields[i];
      if (f.find_first_of(",\"\n\r") == std::string::npos) {
        out += f;
      } else {
        out += '"';
        for (char c : f) {
          if (c == '"') out += '"';
          out += c;
        }
        out += '"';
      }
    }
    out += '\n';
  };
  emit(header);
  for (const auto& r : rows) emit(r);
  return out;
}

std::vector<std::vector<double>> parse_table(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::vector<double> row;
    std::string tok;
    while (fields >> tok) {
      double v = 0.0;
      const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      require(res.ec == std::errc{} && res.ptr == tok.data() + tok.size() && std::isfinite(v),
              ErrorKind::Parse, "line " + std::to_string(lineno) + ": bad number '" + tok + "'");
      row.push_back(v);
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return rows;
}

ScattererField parse_scatterers(const std::string& text) {
  std::vector<Scatterer> s;
  for (const auto& row : parse_table(text)) {
    require(row.size() == 3, ErrorKind::Parse, "scatterer lines hold exactly x z amplitude");
    s.push_back({row[0], row[1], row[2]});
  }
  return ScattererField(std::move(s));
}

RealImage parse_kernel(const std::string& text) {
  const auto rows = parse_table(text);
  require(!rows.empty(), ErrorKind::Parse, "kernel file is empty");
  RealImage k(rows.size(), rows.front().size());
  for (std::size_t ix = 0; ix < rows.size(); ++ix) {
    require(rows[ix].size() == k.nz(), ErrorKind::Parse, "kernel rows differ in length");
    for (std::size_t iz = 0; iz < k.nz(); ++iz) k(ix, iz) = rows[ix][iz];
  }
  return k;
}

}  // namespace usmb::io
