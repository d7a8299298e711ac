// Copyright 2026 nerp project developers
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nerp/image_io.hpp"
#include "nerp/phantom.hpp"
#include "nerp/pipeline.hpp"
#include "nerp/volume_io.hpp"

namespace fs = std::filesystem;
using nerp::DatasetConfig;
using nerp::DatasetResult;
using nerp::ManifestRecord;
using nerp::VolumeRef;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("nerp-pipe-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

// Writes the two-spheres phantom (CT plus auto-paired segmentation) into dir.
fs::path write_phantom(const fs::path& dir, const std::string& stem) {
    const nerp::Phantom ph = nerp::make_phantom(nerp::phantom_preset("two-spheres"));
    const fs::path ct = dir / (stem + ".raw");
    nerp::save_volume(ph.ct, ct);
    nerp::save_seg_volume(ph.seg, dir / (stem + "_seg.raw"));
    return ct;
}

DatasetConfig small_config(const fs::path& ct, const fs::path& out) {
    DatasetConfig cfg;
    cfg.volumes.push_back({"", ct, std::nullopt});
    cfg.out_dir = out;
    cfg.views = 3;
    cfg.seed = 11;
    cfg.base_pose.distance_mm = 400.0;
    cfg.fov_deg = 20.0;
    cfg.rows = 24;
    cfg.cols = 24;
    cfg.render.samples = 48;
    return cfg;
}

std::vector<json> read_manifest(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::vector<json> lines;
    std::string line;
    while (std::getline(in, line)) {
        REQUIRE(!line.empty());
        lines.push_back(json::parse(line));
    }
    return lines;
}

std::vector<std::uint8_t> slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    const std::string s = os.str();
    return {s.begin(), s.end()};
}

}  // namespace

TEST_CASE("dataset renders every view with masks and a faithful manifest") {
    TempDir dir;
    const fs::path ct = write_phantom(dir.path, "pelvis");
    const DatasetConfig cfg = small_config(ct, dir.path / "out");
    const DatasetResult result = nerp::generate_dataset(cfg);

    CHECK(result.rendered_views == 3);
    CHECK(result.failed_volumes == 0);
    REQUIRE(result.records.size() == 3);
    CHECK(result.manifest_path == cfg.out_dir / "manifest.jsonl");
    CHECK(!fs::exists(cfg.out_dir / "manifest.jsonl.tmp"));

    for (int v = 0; v < 3; ++v) {
        const ManifestRecord& rec = result.records[static_cast<std::size_t>(v)];
        CHECK(rec.volume_id == "pelvis");
        CHECK(rec.view_index == v);
        CHECK(rec.error.empty());
        CHECK(rec.image == "images/pelvis_00" + std::to_string(v) + ".png");
        REQUIRE(rec.mask.has_value());
        CHECK(*rec.mask == "masks/pelvis_00" + std::to_string(v) + ".png");
        const fs::path image_path = cfg.out_dir / rec.image;
        const fs::path mask_path = cfg.out_dir / *rec.mask;
        REQUIRE(fs::exists(image_path));
        REQUIRE(fs::exists(mask_path));
        CHECK(rec.image_crc32 == nerp::crc32_hex(nerp::crc32_file(image_path)));
        CHECK(*rec.mask_crc32 == nerp::crc32_hex(nerp::crc32_file(mask_path)));
        CHECK(rec.rows == 24);
        CHECK(rec.cols == 24);
        // Sampled poses stay inside the proximity box around the base.
        CHECK(std::abs(rec.pose.yaw_deg) <= cfg.prox.yaw_deg + 1e-12);
        CHECK(std::abs(rec.pose.pitch_deg) <= cfg.prox.pitch_deg + 1e-12);
        CHECK(std::abs(rec.pose.roll_deg) <= cfg.prox.roll_deg + 1e-12);
        CHECK(rec.pose.distance_mm >= 400.0 * (1.0 - cfg.prox.distance_frac) - 1e-9);
        CHECK(rec.pose.distance_mm <= 400.0 * (1.0 + cfg.prox.distance_frac) + 1e-9);
        CHECK(std::abs(rec.fov_deg - 20.0) <= cfg.prox.fov_deg + 1e-12);
        // Auto-target aims at the volume center (the preset grid is centered).
        CHECK(rec.pose.target == nerp::Vec3{0.0, 0.0, 0.0});
    }

    const std::vector<json> lines = read_manifest(result.manifest_path);
    REQUIRE(lines.size() == 3);
    for (int v = 0; v < 3; ++v) {
        const json& j = lines[static_cast<std::size_t>(v)];
        CHECK(j.at("volume_id") == "pelvis");
        CHECK(j.at("view_index") == v);
        CHECK(j.at("seed") == result.records[static_cast<std::size_t>(v)].seed);
        CHECK(j.at("mode") == "ea");
        CHECK(j.at("samples") == 48);
        CHECK(j.at("rows") == 24);
        CHECK(!j.contains("error"));
        const json& pose = j.at("pose");
        CHECK(pose.at("fov_deg") ==
              result.records[static_cast<std::size_t>(v)].fov_deg);
        REQUIRE(pose.at("target_mm").size() == 3);
    }
}

TEST_CASE("a volume without segmentation gets images but no masks") {
    TempDir dir;
    const nerp::Phantom ph = nerp::make_phantom(nerp::phantom_preset("sphere"));
    const fs::path ct = dir.path / "lone.raw";
    nerp::save_volume(ph.ct, ct);

    DatasetConfig cfg = small_config(ct, dir.path / "out");
    cfg.views = 1;
    const DatasetResult result = nerp::generate_dataset(cfg);
    REQUIRE(result.records.size() == 1);
    CHECK(!result.records[0].mask.has_value());
    CHECK(fs::exists(cfg.out_dir / result.records[0].image));
    const std::vector<json> lines = read_manifest(result.manifest_path);
    CHECK(!lines.at(0).contains("mask"));
}

TEST_CASE("unreadable volumes are skipped and recorded, not fatal") {
    TempDir dir;
    const fs::path ct = write_phantom(dir.path, "good");
    DatasetConfig cfg = small_config(ct, dir.path / "out");
    cfg.views = 2;
    cfg.volumes.insert(cfg.volumes.begin(),
                       {"ghost", dir.path / "missing.raw", std::nullopt});

    const DatasetResult result = nerp::generate_dataset(cfg);
    CHECK(result.failed_volumes == 1);
    CHECK(result.rendered_views == 2);
    REQUIRE(result.records.size() == 3);
    CHECK(result.records[0].volume_id == "ghost");
    CHECK(result.records[0].view_index == -1);
    CHECK(!result.records[0].error.empty());

    const std::vector<json> lines = read_manifest(result.manifest_path);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0].at("volume_id") == "ghost");
    CHECK(lines[0].contains("error"));
    CHECK(!lines[0].contains("image"));
    CHECK(lines[1].at("volume_id") == "good");
}

TEST_CASE("reruns of the same config are bytewise identical") {
    TempDir dir;
    const fs::path ct = write_phantom(dir.path, "pelvis");
    DatasetConfig cfg_a = small_config(ct, dir.path / "a");
    DatasetConfig cfg_b = small_config(ct, dir.path / "b");
    cfg_a.views = cfg_b.views = 2;
    const DatasetResult ra = nerp::generate_dataset(cfg_a);
    const DatasetResult rb = nerp::generate_dataset(cfg_b);

    CHECK(slurp(ra.manifest_path) == slurp(rb.manifest_path));
    for (std::size_t i = 0; i < ra.records.size(); ++i) {
        CHECK(slurp(cfg_a.out_dir / ra.records[i].image) ==
              slurp(cfg_b.out_dir / rb.records[i].image));
        CHECK(slurp(cfg_a.out_dir / *ra.records[i].mask) ==
              slurp(cfg_b.out_dir / *rb.records[i].mask));
    }
}

TEST_CASE("per-volume seeding makes views independent of the roster") {
    TempDir dir;
    const fs::path ct = write_phantom(dir.path, "pelvis");

    DatasetConfig both = small_config(ct, dir.path / "both");
    both.views = 2;
    both.volumes.clear();
    both.volumes.push_back({"alpha", ct, std::nullopt});
    both.volumes.push_back({"beta", ct, std::nullopt});

    DatasetConfig solo = small_config(ct, dir.path / "solo");
    solo.views = 2;
    solo.volumes.clear();
    solo.volumes.push_back({"beta", ct, std::nullopt});

    const DatasetResult r_both = nerp::generate_dataset(both);
    const DatasetResult r_solo = nerp::generate_dataset(solo);
    REQUIRE(r_both.records.size() == 4);
    REQUIRE(r_solo.records.size() == 2);

    // The two ids draw distinct pose streams.
    CHECK(r_both.records[0].seed != r_both.records[2].seed);
    CHECK(r_both.records[0].image_crc32 != r_both.records[2].image_crc32);

    // beta's views match bit for bit whether or not alpha is present.
    for (int v = 0; v < 2; ++v) {
        const ManifestRecord& b = r_both.records[static_cast<std::size_t>(2 + v)];
        const ManifestRecord& s = r_solo.records[static_cast<std::size_t>(v)];
        CHECK(b.seed == s.seed);
        CHECK(b.pose.yaw_deg == s.pose.yaw_deg);
        CHECK(b.pose.distance_mm == s.pose.distance_mm);
        CHECK(b.image_crc32 == s.image_crc32);
        CHECK(slurp(both.out_dir / b.image) == slurp(solo.out_dir / s.image));
    }
}

TEST_CASE("pgm output switches the radiograph container but not the masks") {
    TempDir dir;
    const fs::path ct = write_phantom(dir.path, "pelvis");
    DatasetConfig cfg = small_config(ct, dir.path / "out");
    cfg.views = 1;
    cfg.use_pgm = true;
    const DatasetResult result = nerp::generate_dataset(cfg);
    REQUIRE(result.records.size() == 1);
    CHECK(result.records[0].image == "images/pelvis_000.pgm");
    CHECK(*result.records[0].mask == "masks/pelvis_000.png");
    const auto img = nerp::read_pgm16(cfg.out_dir / result.records[0].image);
    CHECK(img.rows == 24);
    CHECK(img.cols == 24);
}

TEST_CASE("dataset config validation") {
    TempDir dir;
    DatasetConfig cfg;
    cfg.out_dir = dir.path / "out";
    CHECK_THROWS_AS(nerp::generate_dataset(cfg), std::invalid_argument);
    cfg.volumes.push_back({"x", dir.path / "x.raw", std::nullopt});
    cfg.views = 0;
    CHECK_THROWS_AS(nerp::generate_dataset(cfg), std::invalid_argument);
}
