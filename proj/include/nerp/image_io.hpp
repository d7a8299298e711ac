// Copyright 2026 nerp project developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nerp/image.hpp"

namespace nerp {

// 16-bit grayscale PNG; pixel = round(clamp(v, 0, 1) * 65535), big-endian.
// The encoder uses filter 0 and a fixed deflate level, so output bytes are a
// pure function of the image.
void write_png_gray16(const Image<double>& img, const std::filesystem::path& path);

// 8-bit paletted PNG for label masks; index 0 is black, the rest follow a
// fixed golden-ratio hue table. Throws if a label falls outside [0, 255].
void write_png_palette8(const Image<int>& labels, const std::filesystem::path& path);

// Binary PGM (P5, maxval 65535, big-endian), same quantization as the PNG.
void write_pgm16(const Image<double>& img, const std::filesystem::path& path);
Image<std::uint16_t> read_pgm16(const std::filesystem::path& path);

// In-memory encoders; the writers above dump these to disk.
std::vector<std::uint8_t> encode_png_gray16(const Image<double>& img);
std::vector<std::uint8_t> encode_png_palette8(const Image<int>& labels);

std::uint32_t crc32_bytes(const std::vector<std::uint8_t>& bytes);
std::uint32_t crc32_file(const std::filesystem::path& path);
std::string crc32_hex(std::uint32_t crc);

}  // namespace nerp
