// Copyright 2026 nerp project developers
// SPDX-License-Identifier: Apache-2.0

#include "nerp/transfer.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <stdexcept>

namespace nerp {

void TransferFunction::validate() const {
    if (points.size() < 2)
        throw std::invalid_argument("transfer function needs at least 2 control points");
    if (points.front().first != 0.0 || points.back().first != 1.0)
        throw std::invalid_argument("transfer function inputs must span 0 and 1");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!std::isfinite(points[i].first) || !std::isfinite(points[i].second))
            throw std::invalid_argument("transfer function control points must be finite");
        if (points[i].second < 0.0)
            throw std::invalid_argument("transfer function outputs must be nonnegative");
        if (i > 0 && points[i].first <= points[i - 1].first)
            throw std::invalid_argument("transfer function inputs must be strictly increasing");
    }
}

double TransferFunction::eval(double x) const {
    x = std::clamp(x, 0.0, 1.0);
    // Linear scan; tables are tiny.
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (x <= points[i].first) {
            const auto& [x0, y0] = points[i - 1];
            const auto& [x1, y1] = points[i];
            const double f = (x - x0) / (x1 - x0);
            return y0 + f * (y1 - y0);
        }
    }
    return points.back().second;
}

double TransferFunction::bandwidth() const {
    // Piecewise linear, so the max over [0,1] is attained at a control point.
    double m = 0.0;
    for (const auto& [x, y] : points) m = std::max(m, y);
    return m;
}

double RadianceVolume::max_matter() const {
    double m = 0.0;
    for (double v : matter.voxels) m = std::max(m, v);
    return m;
}

double RadianceVolume::max_opacity() const {
    double m = 0.0;
    for (double v : opacity.voxels) m = std::max(m, v);
    return m;
}

RadianceVolume map_fields(const NormalizedVolume& vol, const TransferFunction& tf_mu,
                          const TransferFunction& tf_gamma) {
    tf_mu.validate();
    tf_gamma.validate();

    RadianceVolume rv;
    rv.matter.geom = vol.grid.geom;
    rv.opacity.geom = vol.grid.geom;
    const std::size_t n = vol.grid.voxels.size();
    rv.matter.voxels.resize(n);
    rv.opacity.voxels.resize(n);

    // Table-level gate on the lookup bandwidths.
    double scale = 1.0;
    const double table_cap = tf_mu.bandwidth() / 100.0;
    if (tf_gamma.bandwidth() > table_cap) {
        scale = tf_gamma.bandwidth() > 0.0 ? table_cap / tf_gamma.bandwidth() : 0.0;
        rv.opacity_rescaled = true;
    }

    for (std::size_t i = 0; i < n; ++i) {
        const double x = vol.grid.voxels[i];
        rv.matter.voxels[i] = tf_mu.eval(x);
        rv.opacity.voxels[i] = scale * tf_gamma.eval(x);
    }

    // Field-level cap: the realized matter maximum bounds the opacity ceiling.
    const double field_cap = rv.max_matter() / 100.0;
    const double gamma_max = rv.max_opacity();
    if (gamma_max > field_cap) {
        const double s2 = gamma_max > 0.0 ? field_cap / gamma_max : 0.0;
        for (double& g : rv.opacity.voxels) g *= s2;
        scale *= s2;
        rv.opacity_rescaled = true;
    }
    rv.opacity_scale = scale;
    return rv;
}

TransferPair tf_preset(const std::string& name) {
    TransferPair p;
    if (name == "flat") {
        p.mu.points = {{0.0, 1.0}, {1.0, 1.0}};
        p.gamma.points = {{0.0, 0.01}, {1.0, 0.01}};
    } else if (name == "bone") {
        // Emphasize high-HU material; air stays dark and non-attenuating.
        p.mu.points = {{0.0, 0.0}, {0.25, 0.05}, {0.45, 0.35}, {0.7, 1.0}, {1.0, 1.0}};
        p.gamma.points = {{0.0, 0.0}, {0.25, 0.0005}, {0.45, 0.004}, {0.7, 0.01}, {1.0, 0.01}};
    } else if (name == "soft-tissue") {
        p.mu.points = {{0.0, 0.0}, {0.2, 0.1}, {0.35, 0.8}, {0.55, 1.0}, {1.0, 1.0}};
        p.gamma.points = {{0.0, 0.0}, {0.2, 0.001}, {0.35, 0.008}, {0.55, 0.01}, {1.0, 0.01}};
    } else {
        throw std::invalid_argument("unknown transfer preset: " + name);
    }
    return p;
}

std::vector<std::string> tf_preset_names() { return {"bone", "soft-tissue", "flat"}; }

TransferPair load_tf_pair(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open transfer file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("garbled transfer file " + path.string() + ": " + e.what());
    }

    auto parse = [](const nlohmann::json& arr) {
        TransferFunction tf;
        for (const auto& pt : arr)
            tf.points.emplace_back(pt.at(0).get<double>(), pt.at(1).get<double>());
        tf.validate();
        return tf;
    };
    TransferPair p;
    p.mu = parse(j.at("mu"));
    p.gamma = parse(j.at("gamma"));
    return p;
}

}  // namespace nerp
