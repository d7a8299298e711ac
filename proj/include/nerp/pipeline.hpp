// Copyright 2026 nerp project developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nerp/camera.hpp"
#include "nerp/projector.hpp"

namespace nerp {

struct VolumeRef {
    std::string id;  // defaults to the CT file stem
    std::filesystem::path ct_path;
    // Explicit segmentation; when absent, "<stem>_seg.raw" next to the CT is
    // paired automatically if present.
    std::optional<std::filesystem::path> seg_path;
};

struct DatasetConfig {
    std::vector<VolumeRef> volumes;
    std::filesystem::path out_dir;
    int views = 10;
    std::uint64_t seed = 0;
    Pose base_pose;
    bool auto_target = true;  // aim each base pose at the volume center
    double fov_deg = 15.0;
    int rows = 256;
    int cols = 256;
    ProximityParams prox;
    std::string tf_name = "bone";
    std::optional<std::filesystem::path> tf_path;
    RenderOptions render;
    double label_tau = 0.05;
    LabelWeightMode label_mode = LabelWeightMode::EaWeights;
    bool use_pgm = false;  // radiographs as PGM instead of PNG; masks stay PNG
};

// One manifest line. error set means the volume was skipped (view_index -1).
struct ManifestRecord {
    std::string volume_id;
    int view_index = -1;
    std::uint64_t seed = 0;
    std::string image;  // path relative to out_dir
    std::string image_crc32;
    std::optional<std::string> mask;
    std::optional<std::string> mask_crc32;
    std::string mode;
    int samples = 0;
    double tone_scale = 1.0;
    int rows = 0;
    int cols = 0;
    Pose pose;
    double fov_deg = 0.0;
    std::string error;
};

struct DatasetResult {
    std::vector<ManifestRecord> records;
    std::filesystem::path manifest_path;
    int rendered_views = 0;
    int failed_volumes = 0;
};

// Renders views volume by volume, views in index order. Each view draws its
// pose from a seed derived from (seed, volume id, view index), so results do
// not depend on which volumes are present. The JSONL manifest is written to
// a temporary file and renamed into place last.
DatasetResult generate_dataset(const DatasetConfig& cfg);

}  // namespace nerp
