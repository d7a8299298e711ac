// Copyright 2026 nerp project developers
// SPDX-License-Identifier: Apache-2.0

#include "nerp/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "nerp/rng.hpp"
#include "nerp/volume_io.hpp"

namespace nerp {

namespace {

using nlohmann::json;

Vec3 shape_extent(const PhantomShape& s) {
    if (s.kind == ShapeKind::Gaussian) {
        const double reach = 3.0 * s.radii_mm.x;
        return {reach, reach, reach};
    }
    return s.radii_mm;
}

void check_inside(const PhantomShape& s, const Aabb& box, std::size_t index) {
    const Vec3 ext = shape_extent(s);
    const Vec3 lo = s.center_mm - ext;
    const Vec3 hi = s.center_mm + ext;
    if (!box.contains(lo) || !box.contains(hi))
        throw std::invalid_argument("phantom shape " + std::to_string(index) +
                                    " extends outside the grid");
}

GridGeom cube_geom(int n, double spacing) {
    GridGeom g;
    g.nx = g.ny = g.nz = n;
    g.spacing = {spacing, spacing, spacing};
    const double half = 0.5 * (n - 1) * spacing;
    g.origin = {-half, -half, -half};
    return g;
}

}  // namespace

Phantom make_phantom(const PhantomSpec& spec) {
    spec.geom.validate();
    const Aabb box = spec.geom.bounds();
    for (std::size_t i = 0; i < spec.shapes.size(); ++i)
        check_inside(spec.shapes[i], box, i);

    Phantom out;
    out.ct.grid.geom = spec.geom;
    out.ct.grid.voxels.assign(spec.geom.voxel_count(), spec.background_hu);
    out.seg.grid.geom = spec.geom;
    out.seg.grid.voxels.assign(spec.geom.voxel_count(), 0);
    out.seg.label_names = spec.label_names;
    for (const PhantomShape& s : spec.shapes)
        if (s.label > 0) out.has_labels = true;

    for (int iz = 0; iz < spec.geom.nz; ++iz) {
        for (int iy = 0; iy < spec.geom.ny; ++iy) {
            for (int ix = 0; ix < spec.geom.nx; ++ix) {
                const Vec3 p = spec.geom.index_to_world(
                    {static_cast<double>(ix), static_cast<double>(iy),
                     static_cast<double>(iz)});
                const std::size_t k = out.ct.grid.linear(ix, iy, iz);
                double v = spec.background_hu;
                int label = 0;
                for (const PhantomShape& s : spec.shapes) {
                    const Vec3 d = p - s.center_mm;
                    switch (s.kind) {
                        case ShapeKind::Ellipsoid: {
                            const double q = (d.x / s.radii_mm.x) * (d.x / s.radii_mm.x) +
                                             (d.y / s.radii_mm.y) * (d.y / s.radii_mm.y) +
                                             (d.z / s.radii_mm.z) * (d.z / s.radii_mm.z);
                            if (q <= 1.0) {
                                v = s.hu;
                                label = s.label;
                            }
                            break;
                        }
                        case ShapeKind::Box: {
                            if (std::abs(d.x) <= s.radii_mm.x &&
                                std::abs(d.y) <= s.radii_mm.y &&
                                std::abs(d.z) <= s.radii_mm.z) {
                                v = s.hu;
                                label = s.label;
                            }
                            break;
                        }
                        case ShapeKind::Gaussian: {
                            const double sigma = s.radii_mm.x;
                            const double env =
                                std::exp(-0.5 * dot(d, d) / (sigma * sigma));
                            v = std::max(v, spec.background_hu +
                                                (s.hu - spec.background_hu) * env);
                            if (env >= 0.5) label = s.label;
                            break;
                        }
                    }
                }
                out.ct.grid.voxels[k] = std::clamp(v, kHuMin, kHuMax);
                out.seg.grid.voxels[k] = static_cast<std::int16_t>(label);
            }
        }
    }
    return out;
}

PhantomSpec phantom_preset(const std::string& name) {
    PhantomSpec spec;
    spec.geom = cube_geom(64, 2.0);
    if (name == "sphere") {
        spec.shapes.push_back({ShapeKind::Ellipsoid, {0, 0, 0}, {40, 40, 40}, 300.0, 1});
        spec.label_names = {{1, "sphere"}};
    } else if (name == "two-spheres") {
        spec.shapes.push_back({ShapeKind::Ellipsoid, {-25, 0, 0}, {30, 30, 30}, 250.0, 1});
        spec.shapes.push_back({ShapeKind::Ellipsoid, {30, 10, 0}, {20, 20, 20}, 800.0, 2});
        spec.label_names = {{1, "large"}, {2, "small"}};
    } else if (name == "gauss-blob") {
        spec.shapes.push_back({ShapeKind::Gaussian, {0, 0, 0}, {20, 20, 20}, 1500.0, 1});
        spec.label_names = {{1, "blob"}};
    } else if (name == "slabs") {
        spec.shapes.push_back({ShapeKind::Box, {0, 0, -22}, {45, 45, 18}, 100.0, 1});
        spec.shapes.push_back({ShapeKind::Box, {0, 0, 22}, {45, 45, 18}, 700.0, 2});
        spec.label_names = {{1, "tissue"}, {2, "bone"}};
    } else {
        throw std::invalid_argument("unknown phantom preset: " + name);
    }
    return spec;
}

std::vector<std::string> phantom_preset_names() {
    return {"sphere", "two-spheres", "gauss-blob", "slabs"};
}

PhantomSpec load_phantom_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open phantom spec: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw std::runtime_error("garbled phantom spec " + path.string() + ": " + e.what());
    }

    PhantomSpec spec;
    try {
        const auto dims = j.at("dims");
        spec.geom.nz = dims.at(0).get<int>();
        spec.geom.ny = dims.at(1).get<int>();
        spec.geom.nx = dims.at(2).get<int>();
        const auto sp = j.at("spacing_mm");
        spec.geom.spacing = {sp.at(2).get<double>(), sp.at(1).get<double>(),
                             sp.at(0).get<double>()};
        if (j.contains("origin_mm")) {
            const auto org = j.at("origin_mm");
            spec.geom.origin = {org.at(2).get<double>(), org.at(1).get<double>(),
                                org.at(0).get<double>()};
        } else {
            spec.geom.origin = {-0.5 * (spec.geom.nx - 1) * spec.geom.spacing.x,
                                -0.5 * (spec.geom.ny - 1) * spec.geom.spacing.y,
                                -0.5 * (spec.geom.nz - 1) * spec.geom.spacing.z};
        }
        spec.background_hu = j.value("background_hu", -1000.0);
        if (j.contains("labels")) {
            for (const auto& [key, val] : j.at("labels").items())
                spec.label_names[std::stoi(key)] = val.get<std::string>();
        }
        for (const auto& js : j.at("shapes")) {
            PhantomShape s;
            const std::string type = js.at("type").get<std::string>();
            const auto c = js.at("center_mm");
            s.center_mm = {c.at(2).get<double>(), c.at(1).get<double>(),
                           c.at(0).get<double>()};
            if (type == "ellipsoid" || type == "box") {
                s.kind = type == "box" ? ShapeKind::Box : ShapeKind::Ellipsoid;
                const auto r = js.at("radii_mm");
                s.radii_mm = {r.at(2).get<double>(), r.at(1).get<double>(),
                              r.at(0).get<double>()};
            } else if (type == "gaussian") {
                s.kind = ShapeKind::Gaussian;
                const double sigma = js.at("sigma_mm").get<double>();
                s.radii_mm = {sigma, sigma, sigma};
            } else {
                throw std::runtime_error("unknown shape type: " + type);
            }
            s.hu = js.at("hu").get<double>();
            s.label = js.value("label", 0);
            spec.shapes.push_back(s);
        }
    } catch (const json::exception& e) {
        throw std::runtime_error("garbled phantom spec " + path.string() + ": " + e.what());
    }
    return spec;
}

namespace {

// Sum of random Gaussian bumps; peaks stay inside 70% of the grid so the
// field decays toward the boundary.
ScalarGrid bump_field(const GridGeom& geom, Rng& rng, int bumps) {
    struct Bump {
        Vec3 c;
        double sigma;
        double amp;
    };
    const Aabb box = geom.bounds();
    const Vec3 center = box.center();
    const Vec3 half = box.extent() * 0.5;
    std::vector<Bump> spec(bumps);
    for (Bump& b : spec) {
        b.c = {center.x + rng.uniform_symmetric(0.7 * half.x),
               center.y + rng.uniform_symmetric(0.7 * half.y),
               center.z + rng.uniform_symmetric(0.7 * half.z)};
        b.sigma = rng.uniform(10.0, 30.0);
        b.amp = rng.uniform(0.2, 1.0);
    }
    ScalarGrid grid;
    grid.geom = geom;
    grid.voxels.assign(geom.voxel_count(), 0.0);
    for (int iz = 0; iz < geom.nz; ++iz) {
        for (int iy = 0; iy < geom.ny; ++iy) {
            for (int ix = 0; ix < geom.nx; ++ix) {
                const Vec3 p = geom.index_to_world({static_cast<double>(ix),
                                                    static_cast<double>(iy),
                                                    static_cast<double>(iz)});
                double v = 0.0;
                for (const Bump& b : spec) {
                    const Vec3 d = p - b.c;
                    v += b.amp * std::exp(-0.5 * dot(d, d) / (b.sigma * b.sigma));
                }
                grid.voxels[grid.linear(ix, iy, iz)] = v;
            }
        }
    }
    return grid;
}

}  // namespace

RadianceVolume phantom_radiance(const std::string& name, std::uint64_t seed) {
    if (name == "gauss-blob") {
        const GridGeom geom = cube_geom(64, 2.0);
        RadianceVolume rv;
        rv.matter.geom = geom;
        rv.matter.voxels.assign(geom.voxel_count(), 0.0);
        const double sigma = 20.0;
        for (int iz = 0; iz < geom.nz; ++iz) {
            for (int iy = 0; iy < geom.ny; ++iy) {
                for (int ix = 0; ix < geom.nx; ++ix) {
                    const Vec3 p = geom.index_to_world({static_cast<double>(ix),
                                                        static_cast<double>(iy),
                                                        static_cast<double>(iz)});
                    rv.matter.voxels[rv.matter.linear(ix, iy, iz)] =
                        std::exp(-0.5 * dot(p, p) / (sigma * sigma));
                }
            }
        }
        rv.opacity = rv.matter;
        for (double& g : rv.opacity.voxels) g /= 100.0;
        return rv;
    }
    if (name == "smooth-noise") {
        const GridGeom geom = cube_geom(48, 2.5);
        Rng rng(seed);
        RadianceVolume rv;
        rv.matter = bump_field(geom, rng, 12);
        rv.opacity = bump_field(geom, rng, 12);
        const double mu_max = *std::max_element(rv.matter.voxels.begin(),
                                                rv.matter.voxels.end());
        const double ga_max = *std::max_element(rv.opacity.voxels.begin(),
                                                rv.opacity.voxels.end());
        // Rescale opacity onto the admissible band below the cap.
        const double scale = ga_max > 0.0 ? (mu_max / 100.0) / ga_max : 0.0;
        for (double& g : rv.opacity.voxels) g *= scale;
        return rv;
    }
    const Phantom ph = make_phantom(phantom_preset(name));
    const NormalizedVolume norm = normalize_hu(ph.ct);
    const TransferPair tf = tf_preset("bone");
    return map_fields(norm, tf.mu, tf.gamma);
}

}  // namespace nerp
