// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <functional>

#include "usmb/config.hpp"
#include "usmb/error.hpp"
#include "usmb/io.hpp"
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

RfDataCube sample_cube() {
  RfDataCube c;
  c.num_events = 2;
  c.num_channels = 3;
  c.num_samples = 5;
  c.fs = 4e7;
  c.speed_of_sound = 1540.0;
  c.center_frequency = 5e6;
  c.events = {TransmitEvent::plane_wave(0.0), TransmitEvent::plane_wave(0.1)};
  RngStream rng(1, 0);
  c.samples.resize(30);
  for (auto& v : c.samples) v = static_cast<float>(rng.normal());
  return c;
}

std::uint32_t u32_at(const io::Bytes& b, std::size_t off) {
  std::uint32_t v = 0;
  std::memcpy(&v, b.data() + off, 4);
  return v;
}

}  // namespace

TEST_CASE("URF1 layout and round trip") {
  const auto c = sample_cube();
  const auto bytes = io::encode_urf1(c);
  CHECK(bytes.size() == 4 + 12 + 24 + 4 * 30);
  CHECK(std::memcmp(bytes.data(), "URF1", 4) == 0);
  CHECK(u32_at(bytes, 4) == 2);
  CHECK(u32_at(bytes, 8) == 3);
  CHECK(u32_at(bytes, 12) == 5);
  const auto d = io::decode_urf1(bytes);
  CHECK(d.num_events == 2);
  CHECK(d.num_channels == 3);
  CHECK(d.num_samples == 5);
  CHECK(d.fs == 4e7);
  CHECK(d.speed_of_sound == 1540.0);
  CHECK(d.center_frequency == 5e6);
  CHECK(d.samples == c.samples);
  // Sample (e, c, t) sits at index (e * C + c) * Nt + t.
  float s = 0.0f;
  std::memcpy(&s, bytes.data() + 40 + 4 * ((1 * 3 + 2) * 5 + 4), 4);
  CHECK(static_cast<double>(s) == c.at(1, 2, 4));
}

TEST_CASE("URF1 rejects damaged files") {
  auto bytes = io::encode_urf1(sample_cube());
  auto cut = bytes;
  cut.resize(cut.size() - 3);
  CHECK(kind_of([&] { io::decode_urf1(cut); }) == ErrorKind::TruncatedPayload);
  try {
    io::decode_urf1(cut);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("truncated payload") != std::string::npos);
  }
  auto header_only = bytes;
  header_only.resize(10);
  CHECK(kind_of([&] { io::decode_urf1(header_only); }) == ErrorKind::TruncatedPayload);
  auto magic = bytes;
  magic[0] = 'X';
  CHECK(kind_of([&] { io::decode_urf1(magic); }) == ErrorKind::BadMagic);
  auto extra = bytes;
  extra.push_back(0);
  CHECK(kind_of([&] { io::decode_urf1(extra); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("UIM1 single image and sequence") {
  RealImage im(3, 2);
  for (std::size_t i = 0; i < im.size(); ++i) im.data()[i] = 0.5 * static_cast<double>(i);
  const auto one = io::encode_uim1(im);
  CHECK(one.size() == 12 + 4 * 6);
  // Lateral-major: column 0 (both axial samples) first.
  float v = 0.0f;
  std::memcpy(&v, one.data() + 12 + 4 * 1, 4);
  CHECK(static_cast<double>(v) == im(0, 1));
  const auto back = io::decode_uim1(one);
  REQUIRE(back.size() == 1);
  CHECK(back[0].data() == im.data());

  RealImage im2 = im;
  for (auto& x : im2.data()) x += 1.0;
  const std::vector<RealImage> seq{im, im2};
  const auto enc = io::encode_uim1_sequence(seq);
  CHECK(enc.size() == 16 + 4 * 12);
  const auto dec = io::decode_uim1(enc);
  REQUIRE(dec.size() == 2);
  CHECK(dec[1].data() == im2.data());

  auto cut = enc;
  cut.resize(cut.size() - 1);
  CHECK_THROWS_AS(io::decode_uim1(cut), Error);
  auto magic = one;
  magic[3] = '2';
  CHECK(kind_of([&] { io::decode_uim1(magic); }) == ErrorKind::BadMagic);
  CHECK_THROWS_AS(io::encode_uim1_sequence(std::vector<RealImage>{im, RealImage(2, 2)}), Error);
}

TEST_CASE("files round trip through disk") {
  const auto dir = std::filesystem::temp_directory_path() / "usmb_io_test";
  std::filesystem::create_directories(dir);
  const auto c = sample_cube();
  io::write_urf1(dir / "a.urf", c);
  CHECK(io::read_urf1(dir / "a.urf").samples == c.samples);
  CHECK(kind_of([&] { io::read_file(dir / "missing.bin"); }) == ErrorKind::Io);
  std::filesystem::remove_all(dir);
}

TEST_CASE("PGM encoding") {
  RealImage im(3, 2);
  im(0, 0) = -10.0;
  im(1, 0) = 0.0;
  im(2, 0) = 5.0;
  im(0, 1) = 20.0;
  const auto p = io::encode_pgm(im, 0.0, 10.0);
  const std::string header = "P5\n3 2\n255\n";
  REQUIRE(p.size() == header.size() + 6);
  CHECK(std::string(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(header.size())) == header);
  const auto* px = p.data() + header.size();
  CHECK(px[0] == 0);
  CHECK(px[1] == 0);
  CHECK(px[2] == 128);
  CHECK(px[3] == 255);
}

TEST_CASE("CSV and number formatting") {
  const auto s = io::format_csv({"a", "b"}, {{"1", "x,y"}, {"say \"hi\"", ""}});
  CHECK(s == "a,b\n1,\"x,y\"\n\"say \"\"hi\"\"\",\n");
  CHECK(io::format_number(0.1) == "0.1");
  CHECK(std::stod(io::format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("text tables") {
  const auto t = io::parse_table("# header\n1 2 3\n\n  4\t5 6  # trailing\n");
  REQUIRE(t.size() == 2);
  CHECK(t[1] == std::vector<double>{4, 5, 6});
  CHECK(kind_of([] { io::parse_table("1 2 abc\n"); }) == ErrorKind::Parse);
  const auto f = io::parse_scatterers("0.001 0.02 1.5\n-0.001 0.03 -1\n");
  REQUIRE(f.scatterers.size() == 2);
  CHECK(f.scatterers[1].amplitude == -1.0);
  CHECK(kind_of([] { io::parse_scatterers("0 0.02\n"); }) == ErrorKind::Parse);
  const auto k = io::parse_kernel("1 2 3\n4 5 6\n");
  CHECK(k.nx() == 2);
  CHECK(k(1, 0) == 4.0);
  CHECK(kind_of([] { io::parse_kernel("1 2\n3\n"); }) == ErrorKind::Parse);
}

TEST_CASE("pipeline configuration") {
  PipelineConfig c;
  CHECK(c.get("bf.method") == "das");
  CHECK(c.get_size("sim.elements") == 64);
  CHECK(c.get_bool("tof.analytic"));
  c.set("sim.angles", "-5, 0,5");
  CHECK(c.get_list("sim.angles") == std::vector<double>{-5, 0, 5});
  CHECK(kind_of([&] { c.set("no.such", "1"); }) == ErrorKind::Parse);
  CHECK(kind_of([&] { (void)c.get("no.such"); }) == ErrorKind::Parse);
  c.set("bf.iters", "two");
  CHECK(kind_of([&] { (void)c.get_int("bf.iters"); }) == ErrorKind::Parse);
  c.set("bf.iters", "3");

  c.merge_text("# comment\nsim.seed = 17\n\nbf.method=mv  # trailing\n");
  CHECK(c.get_int("sim.seed") == 17);
  CHECK(c.get("bf.method") == "mv");
  CHECK(kind_of([&] { c.merge_text("sim.seed 3\n"); }) == ErrorKind::Parse);

  PipelineConfig d;
  d.merge_text(c.to_text());
  for (const auto& [key, entry] : c.entries()) CHECK(d.get(key) == entry.value);
  CHECK(d.to_text() == c.to_text());
}
