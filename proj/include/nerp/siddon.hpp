// Copyright 2026 nerp project developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "nerp/camera.hpp"
#include "nerp/grid.hpp"
#include "nerp/image.hpp"
#include "nerp/transfer.hpp"

namespace nerp {

struct VoxelStep {
    int ix = 0;
    int iy = 0;
    int iz = 0;
    double length = 0.0;  // chord length in mm, > 0
};

struct VoxelPath {
    std::vector<VoxelStep> steps;
    double total_length = 0.0;
};

// Exact ray-grid traversal. Chord lengths telescope, so total_length equals
// the clipped parametric interval to rounding. A missing ray yields an empty
// path. Zero-length corner chords are dropped; each voxel appears at most
// once.
VoxelPath siddon_trace(const GridGeom& geom, const Ray& ray);

// Emission-absorption integration over the exact per-voxel chords, treating
// both fields as piecewise constant. Independent of the sampled renderer:
// no interpolation, no quadrature.
double siddon_pixel(const RadianceVolume& rv, const Ray& ray);

Radiograph siddon_project(const RadianceVolume& rv, const Camera& cam,
                          double tone_scale = 1.0);
Radiograph siddon_project_reference(const RadianceVolume& rv, const Camera& cam,
                                    double tone_scale = 1.0);

// Radiological path lengths sum(gamma_v * l_v) per pixel, unclamped.
Image<double> siddon_radiological(const RadianceVolume& rv, const Camera& cam);

struct DiffStats {
    double max_abs = 0.0;
    double mean_abs = 0.0;
    double p99_abs = 0.0;
};

// Pixelwise |a - b|; shapes must agree.
DiffStats image_diff(const Image<double>& a, const Image<double>& b);

}  // namespace nerp
