// Copyright 2026 nerp project developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "nerp/projector.hpp"

namespace nerp {

// Sparse analytic gradient of one pixel intensity with respect to the voxel
// fields. Entries are (linear voxel index, derivative), sorted by index.
struct PixelGradient {
    double value = 0.0;
    double transmittance = 1.0;
    std::vector<std::pair<std::size_t, double>> d_mu;
    std::vector<std::pair<std::size_t, double>> d_gamma;
};

// Backward sweep over the same stratified samples as march_ray:
//   dI/dmu(t_i)    = w_i
//   dI/dgamma(t_i) = delta * (T_{i+1} * mu_i - S_i),  S_i = sum_{j>i} w_j mu_j
// scattered onto each sample's trilinear stencil. Matches march_ray bit for
// bit on the forward value.
PixelGradient grad_pixel(const RadianceVolume& rv, const Ray& ray, int n = 512);

struct GradCheckReport {
    int probes_mu = 0;
    int probes_gamma = 0;
    double max_rel_mu = 0.0;
    double mean_rel_mu = 0.0;
    double max_rel_gamma = 0.0;
    double mean_rel_gamma = 0.0;
    double min_d_mu = 0.0;  // smallest dI/dmu entry seen; must stay >= 0
};

// Central-difference comparison on randomly probed voxels of randomly drawn
// rays. Relative error uses an absolute floor:
//   rel = |a - fd| / max(|a|, |fd|, 1e-6)
// so that near-zero stencil-corner entries are judged against the floor
// instead of amplified rounding noise. Deterministic for a given seed.
GradCheckReport grad_check(const RadianceVolume& rv,
                           const std::vector<Ray>& rays, int n, double h,
                           int probes, std::uint64_t seed);

}  // namespace nerp
