// Copyright 2026 nerp project developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "nerp/grid.hpp"
#include "nerp/transfer.hpp"

namespace nerp {

enum class ShapeKind { Ellipsoid, Box, Gaussian };

struct PhantomShape {
    ShapeKind kind = ShapeKind::Ellipsoid;
    Vec3 center_mm;
    // Ellipsoid: semi-axes. Box: half extents. Gaussian: isotropic sigma in
    // radii_mm.x; its declared support is 3 sigma.
    Vec3 radii_mm;
    double hu = 0.0;  // fill value; Gaussian peak
    int label = 0;    // 0 = unlabeled (clears earlier labels where it covers)
};

struct PhantomSpec {
    GridGeom geom;
    double background_hu = -1000.0;
    std::vector<PhantomShape> shapes;
    std::map<int, std::string> label_names;
};

struct Phantom {
    CtVolume ct;
    SegVolume seg;
    bool has_labels = false;
};

// Rasterizes shapes in order at voxel centers; later shapes overwrite.
// Ellipsoids and boxes fill their HU hard; Gaussians blend max(current,
// background + (hu - background) * envelope) and label where the envelope is
// at least 0.5. Throws if a shape's support leaves the grid.
Phantom make_phantom(const PhantomSpec& spec);

// Built-in specs: "sphere", "two-spheres", "gauss-blob", "slabs".
PhantomSpec phantom_preset(const std::string& name);
std::vector<std::string> phantom_preset_names();

// JSON spec; all coordinate triplets use [z, y, x] order like the volume
// sidecars. origin_mm defaults to centering the grid on the world origin.
PhantomSpec load_phantom_spec(const std::filesystem::path& path);

// Ready-made radiance fields for gradient and oracle checks.
//   "gauss-blob":   matter exp(-r^2 / 2 sigma^2), opacity = matter / 100
//   "smooth-noise": seeded sum of random bumps, independent fields
// Other names go through phantom_preset + normalize_hu + the bone transfer
// pair.
RadianceVolume phantom_radiance(const std::string& name, std::uint64_t seed = 0);

}  // namespace nerp
