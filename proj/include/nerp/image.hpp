// Copyright 2026 nerp project developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nerp/camera.hpp"

namespace nerp {

template <typename T>
struct Image {
    int rows = 0;
    int cols = 0;
    std::vector<T> data;

    Image() = default;
    Image(int r, int c, T fill = T{})
        : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}

    T& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    const T& at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

    bool same_shape(const Image& o) const { return rows == o.rows && cols == o.cols; }
};

enum class RenderMode { EA, AIP, MIP };

const char* render_mode_name(RenderMode mode);
RenderMode parse_render_mode(const std::string& name);

struct RenderMeta {
    RenderMode mode = RenderMode::EA;
    int samples = 512;
    double tone_scale = 1.0;
    Camera camera;
};

// Rendered radiograph; every pixel lies in [0, 1].
struct Radiograph {
    Image<double> image;
    RenderMeta meta;
};

// Per-pixel label ids aligned to a Radiograph; 0 = background.
struct MaskImage {
    Image<int> labels;
};

}  // namespace nerp
