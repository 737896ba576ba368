// SPDX-License-Identifier: Apache-2.0
//
// File formats. All binary formats are little-endian.
//   URF1  "URF1", u32 E, u32 C, u32 Nt, f64 fs, f64 v, f64 f0, f32 samples[E][C][Nt]
//   UIM1  "UIM1", u32 Rx, u32 Rz, f32 data[Rx][Rz]           (single image)
//   UIM1  "UIM1", u32 Rx, u32 Rz, u32 T, f32 data[T][Rx][Rz] (sequence)
// The two UIM1 variants are told apart by the file size. Image data is
// stored lateral-major: all Rz axial samples of column 0 first.
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "usmb/core.hpp"

namespace usmb::io {

using Bytes = std::vector<std::uint8_t>;

Bytes encode_urf1(const RfDataCube& cube);
/// Events are not part of the format; the returned cube has none.
RfDataCube decode_urf1(std::span<const std::uint8_t> bytes);

Bytes encode_uim1(const RealImage& image);
Bytes encode_uim1_sequence(std::span<const RealImage> frames);
/// Accepts either variant; a single image comes back as a one-frame sequence.
std::vector<RealImage> decode_uim1(std::span<const std::uint8_t> bytes);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text(const std::filesystem::path& path, const std::string& text);

RfDataCube read_urf1(const std::filesystem::path& path);
void write_urf1(const std::filesystem::path& path, const RfDataCube& cube);
std::vector<RealImage> read_uim1(const std::filesystem::path& path);
void write_uim1(const std::filesystem::path& path, const RealImage& image);
void write_uim1_sequence(const std::filesystem::path& path, std::span<const RealImage> frames);

/// 8-bit binary PGM, width = nx, height = nz (axial rows top to bottom).
/// Values in [lo, hi] map linearly onto 0..255 and are clamped outside.
Bytes encode_pgm(const RealImage& image, double lo, double hi);
void write_pgm(const std::filesystem::path& path, const RealImage& image, double lo, double hi);
/// PGM scaled from the image minimum to its maximum.
void write_pgm_autoscale(const std::filesystem::path& path, const RealImage& image);

/// CSV with a header row; fields holding commas, quotes or newlines are quoted.
std::string format_csv(const std::vector<std::string>& header,
                       const std::vector<std::vector<std::string>>& rows);
/// Shortest round-trip decimal form of a double.
std::string format_number(double v);

/// Whitespace-separated numeric rows, '#' starts a comment, blank lines skipped.
std::vector<std::vector<double>> parse_table(const std::string& text);

/// One "x_m z_m amplitude" triple per line.
ScattererField parse_scatterers(const std::string& text);
/// One row per lateral index, one column per axial index.
RealImage parse_kernel(const std::string& text);

}  // namespace usmb::io
