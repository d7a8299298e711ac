// Copyright 2026 nerp project developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include "nerp/grid.hpp"

namespace nerp {

// Raw little-endian int16 voxels, x fastest then y then z, with a JSON sidecar
// describing the geometry:
//   dims        [D, H, W]
//   spacing_mm  [sz, sy, sx]
//   origin_mm   [z, y, x]
//   dtype       "int16"
//   labels      optional {"1": "name", ...} for segmentation volumes
// The sidecar for foo.raw lives at foo.json.

std::filesystem::path sidecar_path(const std::filesystem::path& raw_path);

CtVolume load_volume(const std::filesystem::path& path);
SegVolume load_seg_volume(const std::filesystem::path& path);

void save_volume(const CtVolume& vol, const std::filesystem::path& path);
void save_seg_volume(const SegVolume& seg, const std::filesystem::path& path);

}  // namespace nerp
