// Copyright 2026 nerp project developers
// SPDX-License-Identifier: Apache-2.0

#include "nerp/projector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace nerp {

const char* render_mode_name(RenderMode mode) {
    switch (mode) {
        case RenderMode::EA: return "ea";
        case RenderMode::AIP: return "aip";
        case RenderMode::MIP: return "mip";
    }
    return "ea";
}

RenderMode parse_render_mode(const std::string& name) {
    if (name == "ea") return RenderMode::EA;
    if (name == "aip") return RenderMode::AIP;
    if (name == "mip") return RenderMode::MIP;
    throw std::invalid_argument("unknown render mode: " + name);
}

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Average / maximum intensity projections sample the matter field only.
double scalar_projection(const ScalarGrid& matter, const Ray& ray, int n,
                         RenderMode mode) {
    if (!ray.hits()) return 0.0;
    const double delta = (ray.t_far - ray.t_near) / n;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = ray.t_near + (i + 0.5) * delta;
        const double mu = matter.sample(ray.at(t));
        if (mode == RenderMode::AIP) {
            acc += mu;
        } else {
            acc = std::max(acc, mu);
        }
    }
    return mode == RenderMode::AIP ? acc / n : acc;
}

}  // namespace

MarchResult march_ray(const RadianceVolume& rv, const Ray& ray, int n,
                      bool keep_samples) {
    if (n < 2) throw std::invalid_argument("march_ray: need at least 2 samples");
    MarchResult out;
    if (!ray.hits()) return out;

    const double delta = (ray.t_far - ray.t_near) / n;
    if (keep_samples) {
        out.weights.reserve(n);
        out.mu.reserve(n);
    }
    double transmittance = 1.0;
    double intensity = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = ray.t_near + (i + 0.5) * delta;
        const Vec3 p = ray.at(t);
        // One trilinear stencil serves both fields; the grids share geometry.
        const TriStencil st = rv.matter.stencil(p);
        double mu = 0.0;
        double gamma = 0.0;
        for (int k = 0; k < st.count; ++k) {
            mu += st.w[k] * rv.matter.voxels[st.idx[k]];
            gamma += st.w[k] * rv.opacity.voxels[st.idx[k]];
        }
        const double alpha = -std::expm1(-gamma * delta);
        const double w = transmittance * alpha;
        intensity += w * mu;
        transmittance -= w;  // exact telescoping keeps sum(w) + T at 1
        if (keep_samples) {
            out.weights.push_back(w);
            out.mu.push_back(mu);
        }
    }
    out.value = intensity;
    out.transmittance = transmittance;
    return out;
}

namespace {

double render_pixel(const RadianceVolume& rv, const Ray& ray,
                    const RenderOptions& opts) {
    double value;
    if (opts.mode == RenderMode::EA) {
        value = march_ray(rv, ray, opts.samples).value;
    } else {
        value = scalar_projection(rv.matter, ray, opts.samples, opts.mode);
    }
    return clamp01(value * opts.tone_scale);
}

Radiograph render_impl(const RadianceVolume& rv, const Camera& cam,
                       const RenderOptions& opts, bool parallel) {
    cam.validate();
    if (opts.samples < 2)
        throw std::invalid_argument("render: need at least 2 samples");
    Radiograph out;
    out.image = Image<double>(cam.rows, cam.cols);
    out.meta = {opts.mode, opts.samples, opts.tone_scale, cam};
    const Aabb box = rv.bounds();

    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int r = 0; r < cam.rows; ++r) {
            for (int c = 0; c < cam.cols; ++c) {
                const Ray ray = make_pixel_ray(cam, r, c, box);
                out.image.at(r, c) = render_pixel(rv, ray, opts);
            }
        }
    } else {
        for (int r = 0; r < cam.rows; ++r) {
            for (int c = 0; c < cam.cols; ++c) {
                const Ray ray = make_pixel_ray(cam, r, c, box);
                out.image.at(r, c) = render_pixel(rv, ray, opts);
            }
        }
    }
    return out;
}

}  // namespace

Radiograph render(const RadianceVolume& rv, const Camera& cam,
                  const RenderOptions& opts) {
    return render_impl(rv, cam, opts, true);
}

Radiograph render_reference(const RadianceVolume& rv, const Camera& cam,
                            const RenderOptions& opts) {
    return render_impl(rv, cam, opts, false);
}

namespace {

// Occupancy tally for the handful of labels a single ray crosses.
struct LabelTally {
    std::vector<std::pair<int, double>> entries;

    void add(int label, double w) {
        for (auto& e : entries) {
            if (e.first == label) {
                e.second += w;
                return;
            }
        }
        entries.emplace_back(label, w);
    }

    // Largest occupancy among labels with occupancy > 0, ties toward the
    // smaller id. Returns {0, 0} when nothing accumulated.
    std::pair<int, double> best() const {
        int label = 0;
        double occ = 0.0;
        for (const auto& e : entries) {
            if (e.second > occ || (e.second == occ && occ > 0.0 && e.first < label)) {
                label = e.first;
                occ = e.second;
            }
        }
        return {label, occ};
    }
};

int label_pixel(const SegVolume& seg, const RadianceVolume& rv, const Ray& ray,
                int n, double tau, LabelWeightMode mode) {
    if (!ray.hits()) return 0;
    const double delta = (ray.t_far - ray.t_near) / n;
    double transmittance = 1.0;
    LabelTally tally;
    for (int i = 0; i < n; ++i) {
        const double t = ray.t_near + (i + 0.5) * delta;
        const Vec3 p = ray.at(t);
        double w = delta;
        if (mode == LabelWeightMode::EaWeights) {
            const TriStencil st = rv.matter.stencil(p);
            double gamma = 0.0;
            for (int k = 0; k < st.count; ++k)
                gamma += st.w[k] * rv.opacity.voxels[st.idx[k]];
            const double alpha = -std::expm1(-gamma * delta);
            w = transmittance * alpha;
            transmittance -= w;
        }
        const int label = seg.grid.nearest(p);
        if (label > 0 && w > 0.0) tally.add(label, w);
    }
    const auto [label, occ] = tally.best();
    return (occ > 0.0 && occ >= tau) ? label : 0;
}

}  // namespace

MaskImage project_labels(const SegVolume& seg, const RadianceVolume& rv,
                         const Camera& cam, int n, double tau,
                         LabelWeightMode mode) {
    cam.validate();
    if (n < 2) throw std::invalid_argument("project_labels: need at least 2 samples");
    if (tau < 0.0) throw std::invalid_argument("project_labels: tau must be >= 0");
    if (!(seg.grid.geom == rv.geom()))
        throw std::invalid_argument("project_labels: segmentation geometry mismatch");

    MaskImage out;
    out.labels = Image<int>(cam.rows, cam.cols);
    const Aabb box = rv.bounds();
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < cam.rows; ++r) {
        for (int c = 0; c < cam.cols; ++c) {
            const Ray ray = make_pixel_ray(cam, r, c, box);
            out.labels.at(r, c) = label_pixel(seg, rv, ray, n, tau, mode);
        }
    }
    return out;
}

}  // namespace nerp
