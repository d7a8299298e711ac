// Copyright 2026 nerp project developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "nerp/geometry.hpp"
#include "nerp/rng.hpp"

namespace nerp {

// Orbit parameterization of a perspective source around a look-at target.
// yaw rotates about world +z, pitch elevates toward +z, roll spins the camera
// about its view axis. yaw = pitch = 0 places the source at
// target + distance * (0, -1, 0), the anterior-posterior convention used by the
// default tube geometry (1000 mm source-to-axis distance).
struct Pose {
    Vec3 target{0.0, 0.0, 0.0};
    double yaw_deg = 0.0;
    double pitch_deg = 0.0;
    double roll_deg = 0.0;
    double distance_mm = 1000.0;
    Vec3 up_hint{0.0, 0.0, 1.0};

    Vec3 source() const;
    Vec3 view_dir() const;  // unit vector from source toward target

    void validate() const;  // distance > 0, up not parallel to view
};

struct Camera {
    Pose pose;
    double fov_deg = 15.0;  // vertical field of view, open interval (0, 180)
    int rows = 256;
    int cols = 256;

    void validate() const;
};

// Half-widths of the uniform sampling intervals around a base pose.
// distance_frac scales the distance multiplicatively and must stay below 1 so
// the sampled distance cannot reach zero.
struct ProximityParams {
    double yaw_deg = 10.0;
    double pitch_deg = 10.0;
    double roll_deg = 5.0;
    double distance_frac = 0.10;
    double fov_deg = 5.0;

    void validate() const;
};

struct RayBundle {
    int rows = 0;
    int cols = 0;
    std::vector<Ray> rays;  // row-major, one per pixel

    const Ray& at(int r, int c) const { return rays[static_cast<std::size_t>(r) * cols + c]; }
};

// Each perturbation is drawn uniformly from [-delta, +delta]; deterministic for a
// given rng state. A degenerate draw (distance <= 0 or up parallel to view) is
// resampled up to 16 times before erroring.
Pose sample_pose(const Pose& base, const ProximityParams& prox, Rng& rng);

// sample_pose plus the FoV half-width; clamps fov into (0, 180) via resampling.
Camera sample_camera(const Camera& base, const ProximityParams& prox, Rng& rng);

// One ray per pixel through the pixel center, clipped against bounds. Rays that
// miss the volume carry an empty interval.
RayBundle generate_rays(const Camera& cam, const Aabb& bounds);

Ray make_pixel_ray(const Camera& cam, int row, int col, const Aabb& bounds);

}  // namespace nerp
