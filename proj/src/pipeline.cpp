// Copyright 2026 nerp project developers
// SPDX-License-Identifier: Apache-2.0

#include "nerp/pipeline.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "nerp/image_io.hpp"
#include "nerp/rng.hpp"
#include "nerp/volume_io.hpp"

namespace nerp {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string sanitize_id(const std::string& raw) {
    std::string out;
    for (char c : raw) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '-' || c == '_';
        out.push_back(ok ? c : '_');
    }
    return out.empty() ? std::string("volume") : out;
}

std::string view_name(const std::string& id, int view) {
    std::ostringstream os;
    os << id << "_" << std::setw(3) << std::setfill('0') << view;
    return os.str();
}

json pose_json(const Pose& pose, double fov_deg) {
    return json{{"yaw_deg", pose.yaw_deg},
                {"pitch_deg", pose.pitch_deg},
                {"roll_deg", pose.roll_deg},
                {"distance_mm", pose.distance_mm},
                {"fov_deg", fov_deg},
                {"target_mm", {pose.target.z, pose.target.y, pose.target.x}}};
}

json record_json(const ManifestRecord& r) {
    if (!r.error.empty())
        return json{{"volume_id", r.volume_id}, {"error", r.error}};
    json j{{"volume_id", r.volume_id},
           {"view_index", r.view_index},
           {"seed", r.seed},
           {"image", r.image},
           {"image_crc32", r.image_crc32},
           {"mode", r.mode},
           {"samples", r.samples},
           {"tone_scale", r.tone_scale},
           {"rows", r.rows},
           {"cols", r.cols},
           {"pose", pose_json(r.pose, r.fov_deg)}};
    if (r.mask) {
        j["mask"] = *r.mask;
        j["mask_crc32"] = *r.mask_crc32;
    }
    return j;
}

struct LoadedVolume {
    RadianceVolume rv;
    std::optional<SegVolume> seg;
};

LoadedVolume load_for_render(const VolumeRef& ref, const TransferPair& tf) {
    LoadedVolume out;
    const CtVolume ct = load_volume(ref.ct_path);
    fs::path seg_path;
    if (ref.seg_path) {
        seg_path = *ref.seg_path;
    } else {
        fs::path probe = ref.ct_path;
        probe.replace_filename(ref.ct_path.stem().string() + "_seg.raw");
        if (fs::exists(probe)) seg_path = probe;
    }
    if (!seg_path.empty()) {
        SegVolume seg = load_seg_volume(seg_path);
        if (!(seg.grid.geom == ct.grid.geom))
            throw std::runtime_error("segmentation geometry mismatch: " +
                                     seg_path.string());
        out.seg = std::move(seg);
    }
    const NormalizedVolume norm = normalize_hu(ct);
    out.rv = map_fields(norm, tf.mu, tf.gamma);
    return out;
}

}  // namespace

DatasetResult generate_dataset(const DatasetConfig& cfg) {
    if (cfg.volumes.empty())
        throw std::invalid_argument("generate_dataset: no volumes");
    if (cfg.views < 1)
        throw std::invalid_argument("generate_dataset: views must be >= 1");
    cfg.prox.validate();

    const TransferPair tf =
        cfg.tf_path ? load_tf_pair(*cfg.tf_path) : tf_preset(cfg.tf_name);

    fs::create_directories(cfg.out_dir / "images");
    fs::create_directories(cfg.out_dir / "masks");

    DatasetResult result;
    for (const VolumeRef& ref : cfg.volumes) {
        const std::string id = sanitize_id(
            ref.id.empty() ? ref.ct_path.stem().string() : ref.id);

        LoadedVolume vol;
        try {
            vol = load_for_render(ref, tf);
        } catch (const std::exception& e) {
            ManifestRecord rec;
            rec.volume_id = id;
            rec.error = e.what();
            result.records.push_back(std::move(rec));
            ++result.failed_volumes;
            continue;
        }

        Camera base;
        base.pose = cfg.base_pose;
        if (cfg.auto_target) base.pose.target = vol.rv.bounds().center();
        base.fov_deg = cfg.fov_deg;
        base.rows = cfg.rows;
        base.cols = cfg.cols;

        for (int v = 0; v < cfg.views; ++v) {
            const std::uint64_t view_seed = derive_seed(cfg.seed, id, v);
            Rng rng(view_seed);
            const Camera cam = sample_camera(base, cfg.prox, rng);
            const Radiograph radiograph = render(vol.rv, cam, cfg.render);

            ManifestRecord rec;
            rec.volume_id = id;
            rec.view_index = v;
            rec.seed = view_seed;
            rec.mode = render_mode_name(cfg.render.mode);
            rec.samples = cfg.render.samples;
            rec.tone_scale = cfg.render.tone_scale;
            rec.rows = cam.rows;
            rec.cols = cam.cols;
            rec.pose = cam.pose;
            rec.fov_deg = cam.fov_deg;

            const std::string stem = view_name(id, v);
            const std::string image_rel =
                "images/" + stem + (cfg.use_pgm ? ".pgm" : ".png");
            const fs::path image_path = cfg.out_dir / image_rel;
            if (cfg.use_pgm) {
                write_pgm16(radiograph.image, image_path);
            } else {
                write_png_gray16(radiograph.image, image_path);
            }
            rec.image = image_rel;
            rec.image_crc32 = crc32_hex(crc32_file(image_path));

            if (vol.seg) {
                const MaskImage mask =
                    project_labels(*vol.seg, vol.rv, cam, cfg.render.samples,
                                   cfg.label_tau, cfg.label_mode);
                const std::string mask_rel = "masks/" + stem + ".png";
                const fs::path mask_path = cfg.out_dir / mask_rel;
                write_png_palette8(mask.labels, mask_path);
                rec.mask = mask_rel;
                rec.mask_crc32 = crc32_hex(crc32_file(mask_path));
            }
            result.records.push_back(std::move(rec));
            ++result.rendered_views;
        }
    }

    result.manifest_path = cfg.out_dir / "manifest.jsonl";
    const fs::path tmp = cfg.out_dir / "manifest.jsonl.tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot write manifest: " + tmp.string());
        for (const ManifestRecord& rec : result.records)
            out << record_json(rec).dump() << "\n";
        if (!out) throw std::runtime_error("manifest write failed: " + tmp.string());
    }
    fs::rename(tmp, result.manifest_path);
    return result;
}

}  // namespace nerp
