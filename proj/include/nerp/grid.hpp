// Copyright 2026 nerp project developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "nerp/geometry.hpp"

namespace nerp {

// HU values are clamped into this range at load time.
inline constexpr double kHuMin = -1100.0;
inline constexpr double kHuMax = 3200.0;

// Voxel-center convention: index i maps to origin + i*spacing, so voxel (0,0,0)
// is centered at origin and the physical bounds extend half a voxel past the
// outermost centers.
struct GridGeom {
    int nx = 0, ny = 0, nz = 0;   // W, H, D
    Vec3 spacing{1.0, 1.0, 1.0};  // mm, all > 0
    Vec3 origin{0.0, 0.0, 0.0};   // world position of voxel (0,0,0), mm

    std::size_t voxel_count() const {
        return static_cast<std::size_t>(nx) * ny * nz;
    }

    Aabb bounds() const {
        const Vec3 half{0.5 * spacing.x, 0.5 * spacing.y, 0.5 * spacing.z};
        const Vec3 last{origin.x + (nx - 1) * spacing.x,
                        origin.y + (ny - 1) * spacing.y,
                        origin.z + (nz - 1) * spacing.z};
        return {origin - half, last + half};
    }

    Vec3 index_to_world(const Vec3& idx) const {
        return {origin.x + idx.x * spacing.x,
                origin.y + idx.y * spacing.y,
                origin.z + idx.z * spacing.z};
    }

    Vec3 world_to_index(const Vec3& p) const {
        return {(p.x - origin.x) / spacing.x,
                (p.y - origin.y) / spacing.y,
                (p.z - origin.z) / spacing.z};
    }

    bool operator==(const GridGeom& o) const {
        return nx == o.nx && ny == o.ny && nz == o.nz && spacing == o.spacing &&
               origin == o.origin;
    }

    void validate() const {
        if (nx <= 0 || ny <= 0 || nz <= 0)
            throw std::invalid_argument("grid dims must be positive");
        if (spacing.x <= 0.0 || spacing.y <= 0.0 || spacing.z <= 0.0)
            throw std::invalid_argument("grid spacing must be strictly positive");
    }
};

// The 8-voxel trilinear stencil around a world point. Clamp addressing keeps the
// field well defined over the whole physical box; points outside it do not get a
// stencil at all (samples there are 0 by contract).
struct TriStencil {
    std::size_t idx[8];
    double w[8];
    int count = 0;  // 0 when the point is outside the bounds
};

// Voxel storage in file order: k = z*H*W + y*W + x (x fastest).
template <typename T>
struct Grid3 {
    GridGeom geom;
    std::vector<T> voxels;

    Grid3() = default;
    explicit Grid3(const GridGeom& g, T fill = T{}) : geom(g), voxels(g.voxel_count(), fill) {
        geom.validate();
    }

    std::size_t linear(int ix, int iy, int iz) const {
        return (static_cast<std::size_t>(iz) * geom.ny + iy) * geom.nx + ix;
    }
    T at(int ix, int iy, int iz) const { return voxels[linear(ix, iy, iz)]; }
    T& at(int ix, int iy, int iz) { return voxels[linear(ix, iy, iz)]; }

    bool in_bounds(const Vec3& p) const { return geom.bounds().contains(p); }

    TriStencil stencil(const Vec3& p) const {
        TriStencil s;
        if (!in_bounds(p)) return s;
        const Vec3 u = geom.world_to_index(p);

        double cx = std::clamp(u.x, 0.0, static_cast<double>(geom.nx - 1));
        double cy = std::clamp(u.y, 0.0, static_cast<double>(geom.ny - 1));
        double cz = std::clamp(u.z, 0.0, static_cast<double>(geom.nz - 1));

        int ix = std::min(static_cast<int>(cx), geom.nx - 2);
        int iy = std::min(static_cast<int>(cy), geom.ny - 2);
        int iz = std::min(static_cast<int>(cz), geom.nz - 2);
        ix = std::max(ix, 0);
        iy = std::max(iy, 0);
        iz = std::max(iz, 0);

        const double fx = geom.nx > 1 ? cx - ix : 0.0;
        const double fy = geom.ny > 1 ? cy - iy : 0.0;
        const double fz = geom.nz > 1 ? cz - iz : 0.0;
        const int jx = geom.nx > 1 ? ix + 1 : ix;
        const int jy = geom.ny > 1 ? iy + 1 : iy;
        const int jz = geom.nz > 1 ? iz + 1 : iz;

        const double wx[2] = {1.0 - fx, fx};
        const double wy[2] = {1.0 - fy, fy};
        const double wz[2] = {1.0 - fz, fz};
        const int gx[2] = {ix, jx};
        const int gy[2] = {iy, jy};
        const int gz[2] = {iz, jz};

        int n = 0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int c = 0; c < 2; ++c) {
                    s.idx[n] = linear(gx[c], gy[b], gz[a]);
                    s.w[n] = wz[a] * wy[b] * wx[c];
                    ++n;
                }
        s.count = n;
        return s;
    }

    // Trilinear interpolation of the 8 surrounding voxels; 0 outside the bounds.
    double sample(const Vec3& p) const {
        const TriStencil s = stencil(p);
        if (s.count == 0) return 0.0;
        double v = 0.0;
        for (int i = 0; i < s.count; ++i) v += s.w[i] * static_cast<double>(voxels[s.idx[i]]);
        return v;
    }

    // Value of the voxel whose center is closest to p; 0 outside the bounds.
    // Labels use this (they cannot be interpolated), and so does the Siddon
    // piecewise-constant field model.
    T nearest(const Vec3& p) const {
        if (!in_bounds(p)) return T{};
        const Vec3 u = geom.world_to_index(p);
        const int ix = std::clamp(static_cast<int>(std::lround(u.x)), 0, geom.nx - 1);
        const int iy = std::clamp(static_cast<int>(std::lround(u.y)), 0, geom.ny - 1);
        const int iz = std::clamp(static_cast<int>(std::lround(u.z)), 0, geom.nz - 1);
        return at(ix, iy, iz);
    }
};

using ScalarGrid = Grid3<double>;
using LabelGrid = Grid3<std::int16_t>;

// 3D scalar grid of Hounsfield units plus spacing/origin metadata.
struct CtVolume {
    ScalarGrid grid;
};

// Same geometry as the source CtVolume; every voxel in [0, 1].
struct NormalizedVolume {
    ScalarGrid grid;
};

// Co-registered integer labels, 0 = background. label_names maps declared label
// ids to human-readable names.
struct SegVolume {
    LabelGrid grid;
    std::map<int, std::string> label_names;
};

// v -> clamp((v - lo)/(hi - lo), 0, 1), geometry preserved.
NormalizedVolume normalize_hu(const CtVolume& vol, double lo = -1024.0, double hi = 3071.0);

inline double sample_trilinear(const NormalizedVolume& vol, const Vec3& p) {
    return vol.grid.sample(p);
}

}  // namespace nerp
