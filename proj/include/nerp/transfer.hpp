// Copyright 2026 nerp project developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "nerp/grid.hpp"

namespace nerp {

// Piecewise-linear lookup table on [0, 1]. Control-point inputs must be strictly
// increasing and span 0 and 1; outputs are nonnegative and finite.
struct TransferFunction {
    std::vector<std::pair<double, double>> points;

    void validate() const;
    double eval(double x) const;       // x clamped into [0, 1]
    double bandwidth() const;          // max output over [0, 1]
};

// Two co-registered fields produced from one normalized CT volume:
// matter is a unitless emission amplitude, opacity an attenuation per mm.
// Invariant: max(opacity) <= max(matter) / 100.
struct RadianceVolume {
    ScalarGrid matter;
    ScalarGrid opacity;

    // Set when map_fields had to rescale the opacity channel to respect the
    // bandwidth cap; opacity_scale is the factor that was applied.
    bool opacity_rescaled = false;
    double opacity_scale = 1.0;

    const GridGeom& geom() const { return matter.geom; }
    Aabb bounds() const { return matter.geom.bounds(); }

    double max_matter() const;
    double max_opacity() const;
};

// Per-voxel evaluation of the two transfer functions. The opacity channel is kept
// at least 100-fold below the matter channel: first at the lookup-table level
// (tf_gamma outputs rescaled when tf_gamma.bandwidth > tf_mu.bandwidth/100) and
// then at the field level, since a volume that never reaches tf_mu's peak lowers
// the admissible opacity ceiling below the table-level cap.
RadianceVolume map_fields(const NormalizedVolume& vol, const TransferFunction& tf_mu,
                          const TransferFunction& tf_gamma);

inline double eval_tf(const TransferFunction& tf, double x) { return tf.eval(x); }

// Shipped presets: "bone", "soft-tissue", "flat".
struct TransferPair {
    TransferFunction mu;
    TransferFunction gamma;
};
TransferPair tf_preset(const std::string& name);
std::vector<std::string> tf_preset_names();

// Sidecar file with one (input, output) list per channel:
//   {"mu": [[0,0],[1,1]], "gamma": [[0,0],[1,0.01]]}
TransferPair load_tf_pair(const std::filesystem::path& path);

}  // namespace nerp
