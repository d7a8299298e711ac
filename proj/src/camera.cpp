// Copyright 2026 nerp project developers
// SPDX-License-Identifier: Apache-2.0

#include "nerp/camera.hpp"

#include <cmath>
#include <stdexcept>

namespace nerp {

Vec3 Pose::source() const {
    const double yaw = deg_to_rad(yaw_deg);
    const double pitch = deg_to_rad(pitch_deg);
    // Unit offset from target to source; (0,-1,0) at yaw = pitch = 0.
    const Vec3 u{std::sin(yaw) * std::cos(pitch), -std::cos(yaw) * std::cos(pitch),
                 std::sin(pitch)};
    return target + u * distance_mm;
}

Vec3 Pose::view_dir() const { return normalized(target - source()); }

void Pose::validate() const {
    if (distance_mm <= 0.0) throw std::invalid_argument("pose distance must be positive");
    const Vec3 v = view_dir();
    const Vec3 up = normalized(up_hint);
    if (std::abs(dot(v, up)) > 1.0 - 1e-9)
        throw std::invalid_argument("pose up hint is parallel to the view direction");
}

void Camera::validate() const {
    pose.validate();
    if (!(fov_deg > 0.0 && fov_deg < 180.0))
        throw std::invalid_argument("camera fov must lie in (0, 180) degrees");
    if (rows < 1 || cols < 1) throw std::invalid_argument("camera image size must be >= 1x1");
}

void ProximityParams::validate() const {
    if (yaw_deg < 0.0 || pitch_deg < 0.0 || roll_deg < 0.0 || distance_frac < 0.0 || fov_deg < 0.0)
        throw std::invalid_argument("proximity half-widths must be nonnegative");
    if (distance_frac >= 1.0)
        throw std::invalid_argument("proximity distance fraction must stay below 1");
}

namespace {

bool pose_ok(const Pose& p) {
    if (p.distance_mm <= 0.0) return false;
    const Vec3 v = p.view_dir();
    const Vec3 up = normalized(p.up_hint);
    return std::abs(dot(v, up)) <= 1.0 - 1e-9;
}

Pose draw_pose(const Pose& base, const ProximityParams& prox, Rng& rng) {
    Pose p = base;
    p.yaw_deg = base.yaw_deg + rng.uniform_symmetric(prox.yaw_deg);
    p.pitch_deg = base.pitch_deg + rng.uniform_symmetric(prox.pitch_deg);
    p.roll_deg = base.roll_deg + rng.uniform_symmetric(prox.roll_deg);
    p.distance_mm = base.distance_mm * (1.0 + rng.uniform_symmetric(prox.distance_frac));
    return p;
}

}  // namespace

Pose sample_pose(const Pose& base, const ProximityParams& prox, Rng& rng) {
    base.validate();
    prox.validate();
    for (int attempt = 0; attempt < 16; ++attempt) {
        Pose p = draw_pose(base, prox, rng);
        if (pose_ok(p)) return p;
    }
    throw std::runtime_error("sample_pose: no valid pose after 16 attempts");
}

Camera sample_camera(const Camera& base, const ProximityParams& prox, Rng& rng) {
    base.validate();
    prox.validate();
    for (int attempt = 0; attempt < 16; ++attempt) {
        Camera cam = base;
        cam.pose = draw_pose(base.pose, prox, rng);
        cam.fov_deg = base.fov_deg + rng.uniform_symmetric(prox.fov_deg);
        if (pose_ok(cam.pose) && cam.fov_deg > 0.0 && cam.fov_deg < 180.0) return cam;
    }
    throw std::runtime_error("sample_camera: no valid camera after 16 attempts");
}

Ray make_pixel_ray(const Camera& cam, int row, int col, const Aabb& bounds) {
    const Vec3 src = cam.pose.source();
    const Vec3 forward = normalized(cam.pose.target - src);
    Vec3 right = normalized(cross(forward, normalized(cam.pose.up_hint)));
    Vec3 up = cross(right, forward);

    // Roll spins right/up about the view axis (Rodrigues with axis = forward).
    const double roll = deg_to_rad(cam.pose.roll_deg);
    if (roll != 0.0) {
        const double c = std::cos(roll), s = std::sin(roll);
        const Vec3 r2 = right * c + cross(forward, right) * s;
        const Vec3 u2 = up * c + cross(forward, up) * s;
        right = r2;
        up = u2;
    }

    const double tan_half = std::tan(0.5 * deg_to_rad(cam.fov_deg));
    const double aspect = static_cast<double>(cam.cols) / cam.rows;
    // Pixel-center convention: pixel (r, c) maps to the center of its cell.
    const double u = ((col + 0.5) / cam.cols * 2.0 - 1.0) * tan_half * aspect;
    const double v = (1.0 - (row + 0.5) / cam.rows * 2.0) * tan_half;

    Ray ray;
    ray.origin = src;
    ray.dir = normalized(forward + right * u + up * v);

    SlabHit hit;
    if (ray_aabb(ray.origin, ray.dir, bounds, hit)) {
        ray.t_near = hit.t_near;
        ray.t_far = hit.t_far;
    } else {
        ray.t_near = 0.0;
        ray.t_far = -1.0;
    }
    return ray;
}

RayBundle generate_rays(const Camera& cam, const Aabb& bounds) {
    cam.validate();
    RayBundle bundle;
    bundle.rows = cam.rows;
    bundle.cols = cam.cols;
    bundle.rays.reserve(static_cast<std::size_t>(cam.rows) * cam.cols);
    for (int r = 0; r < cam.rows; ++r)
        for (int c = 0; c < cam.cols; ++c) bundle.rays.push_back(make_pixel_ray(cam, r, c, bounds));
    return bundle;
}

}  // namespace nerp
