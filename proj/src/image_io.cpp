// Copyright 2026 nerp project developers
// SPDX-License-Identifier: Apache-2.0

#include "nerp/image_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nerp {

namespace {

using Bytes = std::vector<std::uint8_t>;

void put_u32_be(Bytes& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void put_chunk(Bytes& out, const char type[4], const Bytes& data) {
    put_u32_be(out, static_cast<std::uint32_t>(data.size()));
    const std::size_t start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    const std::uint32_t crc = static_cast<std::uint32_t>(
        crc32(0L, out.data() + start, static_cast<uInt>(4 + data.size())));
    put_u32_be(out, crc);
}

Bytes deflate_bytes(const Bytes& raw) {
    uLongf dest_len = compressBound(static_cast<uLong>(raw.size()));
    Bytes dest(dest_len);
    const int rc = compress2(dest.data(), &dest_len, raw.data(),
                             static_cast<uLong>(raw.size()), 6);
    if (rc != Z_OK) throw std::runtime_error("png: deflate failed");
    dest.resize(dest_len);
    return dest;
}

Bytes png_header(int width, int height, int bit_depth, int color_type) {
    Bytes ihdr;
    put_u32_be(ihdr, static_cast<std::uint32_t>(width));
    put_u32_be(ihdr, static_cast<std::uint32_t>(height));
    ihdr.push_back(static_cast<std::uint8_t>(bit_depth));
    ihdr.push_back(static_cast<std::uint8_t>(color_type));
    ihdr.push_back(0);  // deflate
    ihdr.push_back(0);  // adaptive filtering
    ihdr.push_back(0);  // no interlace
    return ihdr;
}

Bytes assemble_png(int width, int height, int bit_depth, int color_type,
                   const Bytes& palette, const Bytes& scanlines) {
    static const std::uint8_t kSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    Bytes png(kSig, kSig + 8);
    put_chunk(png, "IHDR", png_header(width, height, bit_depth, color_type));
    if (!palette.empty()) put_chunk(png, "PLTE", palette);
    put_chunk(png, "IDAT", deflate_bytes(scanlines));
    put_chunk(png, "IEND", {});
    return png;
}

std::uint16_t quantize16(double v) {
    const double c = std::clamp(v, 0.0, 1.0);
    return static_cast<std::uint16_t>(std::lround(c * 65535.0));
}

void check_nonempty(int rows, int cols) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("png: empty image");
}

// 256-entry palette: index 0 black, others spaced by the golden ratio around
// the hue circle so adjacent label ids get distant colors.
Bytes label_palette() {
    Bytes plte;
    plte.reserve(256 * 3);
    plte.push_back(0);
    plte.push_back(0);
    plte.push_back(0);
    for (int i = 1; i < 256; ++i) {
        const double hue = std::fmod(i * 0.61803398874989485, 1.0) * 6.0;
        const double s = 0.75;
        const double v = 0.95;
        const int sector = static_cast<int>(hue);
        const double f = hue - sector;
        const double p = v * (1.0 - s);
        const double q = v * (1.0 - s * f);
        const double t = v * (1.0 - s * (1.0 - f));
        double r, g, b;
        switch (sector % 6) {
            case 0: r = v; g = t; b = p; break;
            case 1: r = q; g = v; b = p; break;
            case 2: r = p; g = v; b = t; break;
            case 3: r = p; g = q; b = v; break;
            case 4: r = t; g = p; b = v; break;
            default: r = v; g = p; b = q; break;
        }
        plte.push_back(static_cast<std::uint8_t>(std::lround(r * 255.0)));
        plte.push_back(static_cast<std::uint8_t>(std::lround(g * 255.0)));
        plte.push_back(static_cast<std::uint8_t>(std::lround(b * 255.0)));
    }
    return plte;
}

void dump(const Bytes& bytes, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

std::vector<std::uint8_t> encode_png_gray16(const Image<double>& img) {
    check_nonempty(img.rows, img.cols);
    Bytes scan;
    scan.reserve(static_cast<std::size_t>(img.rows) * (1 + 2 * img.cols));
    for (int r = 0; r < img.rows; ++r) {
        scan.push_back(0);  // filter: none
        for (int c = 0; c < img.cols; ++c) {
            const std::uint16_t q = quantize16(img.at(r, c));
            scan.push_back(static_cast<std::uint8_t>(q >> 8));
            scan.push_back(static_cast<std::uint8_t>(q & 0xff));
        }
    }
    return assemble_png(img.cols, img.rows, 16, 0, {}, scan);
}

std::vector<std::uint8_t> encode_png_palette8(const Image<int>& labels) {
    check_nonempty(labels.rows, labels.cols);
    Bytes scan;
    scan.reserve(static_cast<std::size_t>(labels.rows) * (1 + labels.cols));
    for (int r = 0; r < labels.rows; ++r) {
        scan.push_back(0);
        for (int c = 0; c < labels.cols; ++c) {
            const int v = labels.at(r, c);
            if (v < 0 || v > 255)
                throw std::invalid_argument("mask label outside [0, 255]");
            scan.push_back(static_cast<std::uint8_t>(v));
        }
    }
    return assemble_png(labels.cols, labels.rows, 8, 3, label_palette(), scan);
}

void write_png_gray16(const Image<double>& img, const std::filesystem::path& path) {
    dump(encode_png_gray16(img), path);
}

void write_png_palette8(const Image<int>& labels, const std::filesystem::path& path) {
    dump(encode_png_palette8(labels), path);
}

void write_pgm16(const Image<double>& img, const std::filesystem::path& path) {
    check_nonempty(img.rows, img.cols);
    Bytes out;
    const std::string header = "P5\n" + std::to_string(img.cols) + " " +
                               std::to_string(img.rows) + "\n65535\n";
    out.insert(out.end(), header.begin(), header.end());
    for (int r = 0; r < img.rows; ++r) {
        for (int c = 0; c < img.cols; ++c) {
            const std::uint16_t q = quantize16(img.at(r, c));
            out.push_back(static_cast<std::uint8_t>(q >> 8));
            out.push_back(static_cast<std::uint8_t>(q & 0xff));
        }
    }
    dump(out, path);
}

Image<std::uint16_t> read_pgm16(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::string magic;
    int cols = 0, rows = 0, maxval = 0;
    in >> magic >> cols >> rows >> maxval;
    if (magic != "P5" || cols < 1 || rows < 1 || maxval != 65535)
        throw std::runtime_error("unsupported pgm: " + path.string());
    in.get();  // single whitespace after maxval
    Image<std::uint16_t> img(rows, cols);
    for (auto& px : img.data) {
        const int hi = in.get();
        const int lo = in.get();
        if (hi < 0 || lo < 0) throw std::runtime_error("truncated pgm: " + path.string());
        px = static_cast<std::uint16_t>((hi << 8) | lo);
    }
    return img;
}

std::uint32_t crc32_bytes(const std::vector<std::uint8_t>& bytes) {
    return static_cast<std::uint32_t>(
        crc32(0L, bytes.data(), static_cast<uInt>(bytes.size())));
}

std::uint32_t crc32_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::uint32_t crc = static_cast<std::uint32_t>(crc32(0L, Z_NULL, 0));
    char buf[65536];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        crc = static_cast<std::uint32_t>(
            crc32(crc, reinterpret_cast<const Bytef*>(buf),
                  static_cast<uInt>(in.gcount())));
    }
    return crc;
}

std::string crc32_hex(std::uint32_t crc) {
    std::ostringstream os;
    os << std::hex << std::nouppercase;
    os.width(8);
    os.fill('0');
    os << crc;
    return os.str();
}

}  // namespace nerp
