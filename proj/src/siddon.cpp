// Copyright 2026 nerp project developers
// SPDX-License-Identifier: Apache-2.0

#include "nerp/siddon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nerp {

VoxelPath siddon_trace(const GridGeom& geom, const Ray& ray) {
    geom.validate();
    VoxelPath path;
    SlabHit hit;
    if (!ray_aabb(ray.origin, ray.dir, geom.bounds(), hit)) return path;
    const double t0 = hit.t_near;
    const double t1 = hit.t_far;
    if (!(t1 > t0)) return path;  // grazing contact carries no length

    const Aabb box = geom.bounds();
    const int n[3] = {geom.nx, geom.ny, geom.nz};
    const double bmin[3] = {box.min.x, box.min.y, box.min.z};
    const double sp[3] = {geom.spacing.x, geom.spacing.y, geom.spacing.z};
    const double o[3] = {ray.origin.x, ray.origin.y, ray.origin.z};
    const double d[3] = {ray.dir.x, ray.dir.y, ray.dir.z};
    const double inf = std::numeric_limits<double>::infinity();

    const Vec3 entry = ray.at(t0);
    const double e[3] = {entry.x, entry.y, entry.z};
    int idx[3];
    int step[3];
    double tmax[3];
    double tdelta[3];
    for (int a = 0; a < 3; ++a) {
        const double u = (e[a] - bmin[a]) / sp[a];
        idx[a] = std::clamp(static_cast<int>(std::floor(u)), 0, n[a] - 1);
        if (d[a] > 0.0) {
            step[a] = 1;
            tdelta[a] = sp[a] / d[a];
            tmax[a] = (bmin[a] + (idx[a] + 1) * sp[a] - o[a]) / d[a];
        } else if (d[a] < 0.0) {
            step[a] = -1;
            tdelta[a] = -sp[a] / d[a];
            tmax[a] = (bmin[a] + idx[a] * sp[a] - o[a]) / d[a];
        } else {
            step[a] = 0;
            tdelta[a] = inf;
            tmax[a] = inf;
        }
    }

    // Advance one axis per iteration; ties resolve on the next pass as
    // zero-length chords, which are dropped.
    double t = t0;
    while (true) {
        int axis = 0;
        if (tmax[1] < tmax[axis]) axis = 1;
        if (tmax[2] < tmax[axis]) axis = 2;
        const double tnext = std::min(tmax[axis], t1);
        const double chord = tnext - t;
        if (chord > 0.0) {
            path.steps.push_back({idx[0], idx[1], idx[2], chord});
            path.total_length += chord;
        }
        if (tmax[axis] >= t1) break;
        t = tmax[axis];
        idx[axis] += step[axis];
        if (idx[axis] < 0 || idx[axis] >= n[axis]) break;
        tmax[axis] += tdelta[axis];
    }
    return path;
}

double siddon_pixel(const RadianceVolume& rv, const Ray& ray) {
    const VoxelPath path = siddon_trace(rv.geom(), ray);
    double transmittance = 1.0;
    double intensity = 0.0;
    for (const VoxelStep& s : path.steps) {
        const double mu = rv.matter.at(s.ix, s.iy, s.iz);
        const double gamma = rv.opacity.at(s.ix, s.iy, s.iz);
        const double alpha = -std::expm1(-gamma * s.length);
        const double w = transmittance * alpha;
        intensity += w * mu;
        transmittance -= w;
    }
    return intensity;
}

namespace {

Radiograph siddon_impl(const RadianceVolume& rv, const Camera& cam,
                       double tone_scale, bool parallel) {
    cam.validate();
    Radiograph out;
    out.image = Image<double>(cam.rows, cam.cols);
    out.meta = {RenderMode::EA, 0, tone_scale, cam};
    const Aabb box = rv.bounds();

    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int r = 0; r < cam.rows; ++r) {
            for (int c = 0; c < cam.cols; ++c) {
                const Ray ray = make_pixel_ray(cam, r, c, box);
                out.image.at(r, c) =
                    std::clamp(siddon_pixel(rv, ray) * tone_scale, 0.0, 1.0);
            }
        }
    } else {
        for (int r = 0; r < cam.rows; ++r) {
            for (int c = 0; c < cam.cols; ++c) {
                const Ray ray = make_pixel_ray(cam, r, c, box);
                out.image.at(r, c) =
                    std::clamp(siddon_pixel(rv, ray) * tone_scale, 0.0, 1.0);
            }
        }
    }
    return out;
}

}  // namespace

Radiograph siddon_project(const RadianceVolume& rv, const Camera& cam,
                          double tone_scale) {
    return siddon_impl(rv, cam, tone_scale, true);
}

Radiograph siddon_project_reference(const RadianceVolume& rv, const Camera& cam,
                                    double tone_scale) {
    return siddon_impl(rv, cam, tone_scale, false);
}

Image<double> siddon_radiological(const RadianceVolume& rv, const Camera& cam) {
    cam.validate();
    Image<double> out(cam.rows, cam.cols);
    const Aabb box = rv.bounds();
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < cam.rows; ++r) {
        for (int c = 0; c < cam.cols; ++c) {
            const Ray ray = make_pixel_ray(cam, r, c, box);
            const VoxelPath path = siddon_trace(rv.geom(), ray);
            double acc = 0.0;
            for (const VoxelStep& s : path.steps)
                acc += rv.opacity.at(s.ix, s.iy, s.iz) * s.length;
            out.at(r, c) = acc;
        }
    }
    return out;
}

DiffStats image_diff(const Image<double>& a, const Image<double>& b) {
    if (!a.same_shape(b))
        throw std::invalid_argument("image_diff: shape mismatch");
    if (a.data.empty()) throw std::invalid_argument("image_diff: empty image");
    std::vector<double> abs_diff(a.data.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        abs_diff[i] = std::abs(a.data[i] - b.data[i]);
        sum += abs_diff[i];
    }
    std::sort(abs_diff.begin(), abs_diff.end());
    DiffStats stats;
    stats.max_abs = abs_diff.back();
    stats.mean_abs = sum / static_cast<double>(abs_diff.size());
    const auto rank = static_cast<std::size_t>(
        std::ceil(0.99 * static_cast<double>(abs_diff.size())));
    stats.p99_abs = abs_diff[std::min(abs_diff.size() - 1, rank == 0 ? 0 : rank - 1)];
    return stats;
}

}  // namespace nerp
