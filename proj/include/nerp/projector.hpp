// Copyright 2026 nerp project developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "nerp/camera.hpp"
#include "nerp/image.hpp"
#include "nerp/transfer.hpp"

namespace nerp {

// One emission-absorption ray march. weights/mu are filled only when
// keep_samples is set; value is the raw intensity before tone mapping.
struct MarchResult {
    double value = 0.0;
    double transmittance = 1.0;
    std::vector<double> weights;
    std::vector<double> mu;
};

// Quadrature over stratified midpoints: delta = (t_far - t_near) / n,
// t_i = t_near + (i + 0.5) * delta. A non-hitting ray yields value 0,
// transmittance 1. Throws std::invalid_argument if n < 2.
MarchResult march_ray(const RadianceVolume& rv, const Ray& ray, int n = 512,
                      bool keep_samples = false);

struct RenderOptions {
    RenderMode mode = RenderMode::EA;
    int samples = 512;
    double tone_scale = 1.0;
};

// Pixel-parallel renderer. Pixels are independent, so the OpenMP schedule
// cannot change any result; render_reference is the plain serial loop kept
// for comparison and timing.
Radiograph render(const RadianceVolume& rv, const Camera& cam,
                  const RenderOptions& opts = {});
Radiograph render_reference(const RadianceVolume& rv, const Camera& cam,
                            const RenderOptions& opts = {});

enum class LabelWeightMode {
    EaWeights,   // occupancy accumulates render weights w_i
    PathLength,  // occupancy accumulates delta per sample
};

// Projects a segmentation into a per-pixel label map using the same ray grid
// as render(). A pixel takes the label with the largest occupancy among
// labels with occupancy > 0 (ties toward the smaller id), or 0 when the best
// occupancy falls below tau. Throws if seg and rv disagree on geometry.
MaskImage project_labels(const SegVolume& seg, const RadianceVolume& rv,
                         const Camera& cam, int n = 512, double tau = 0.05,
                         LabelWeightMode mode = LabelWeightMode::EaWeights);

}  // namespace nerp
