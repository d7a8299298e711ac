// Copyright 2026 nerp project developers
// SPDX-License-Identifier: Apache-2.0

#include "nerp/volume_io.hpp"

#include <fstream>
#include <json.hpp>

namespace nerp {

namespace {

using nlohmann::json;

json read_sidecar(const std::filesystem::path& raw_path) {
    const auto meta_path = sidecar_path(raw_path);
    std::ifstream in(meta_path);
    if (!in) throw std::runtime_error("missing sidecar: " + meta_path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("garbled sidecar " + meta_path.string() + ": " + e.what());
    }
    return j;
}

GridGeom parse_geom(const json& j, const std::filesystem::path& raw_path) {
    if (!j.contains("dims") || !j.contains("spacing_mm") || !j.contains("origin_mm"))
        throw std::runtime_error("sidecar for " + raw_path.string() +
                                 " lacks dims/spacing_mm/origin_mm");
    const auto dims = j.at("dims");
    const auto sp = j.at("spacing_mm");
    const auto org = j.at("origin_mm");
    if (dims.size() != 3 || sp.size() != 3 || org.size() != 3)
        throw std::runtime_error("sidecar arrays must have 3 entries");

    GridGeom g;
    // Sidecar order is [z, y, x].
    g.nz = dims[0].get<int>();
    g.ny = dims[1].get<int>();
    g.nx = dims[2].get<int>();
    g.spacing = {sp[2].get<double>(), sp[1].get<double>(), sp[0].get<double>()};
    g.origin = {org[2].get<double>(), org[1].get<double>(), org[0].get<double>()};
    g.validate();
    return g;
}

std::vector<std::int16_t> read_raw_i16(const std::filesystem::path& path, std::size_t expect) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open volume file: " + path.string());
    in.seekg(0, std::ios::end);
    const auto bytes = static_cast<std::size_t>(in.tellg());
    in.seekg(0, std::ios::beg);
    if (bytes != expect * sizeof(std::int16_t))
        throw std::runtime_error("voxel count mismatch in " + path.string() + ": file holds " +
                                 std::to_string(bytes / sizeof(std::int16_t)) +
                                 " scalars, sidecar declares " + std::to_string(expect));
    std::vector<std::int16_t> data(expect);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(bytes));
    if (!in) throw std::runtime_error("short read on " + path.string());
    return data;
}

void write_raw_i16(const std::filesystem::path& path, const std::vector<std::int16_t>& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write volume file: " + path.string());
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size() * sizeof(std::int16_t)));
    if (!out) throw std::runtime_error("short write on " + path.string());
}

json geom_to_json(const GridGeom& g) {
    json j;
    j["dims"] = {g.nz, g.ny, g.nx};
    j["spacing_mm"] = {g.spacing.z, g.spacing.y, g.spacing.x};
    j["origin_mm"] = {g.origin.z, g.origin.y, g.origin.x};
    j["dtype"] = "int16";
    return j;
}

void check_dtype(const json& j, const std::filesystem::path& raw_path) {
    if (j.contains("dtype") && j.at("dtype").get<std::string>() != "int16")
        throw std::runtime_error("unsupported scalar type in sidecar for " + raw_path.string() +
                                 ": " + j.at("dtype").get<std::string>());
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& raw_path) {
    auto p = raw_path;
    p.replace_extension(".json");
    return p;
}

CtVolume load_volume(const std::filesystem::path& path) {
    const json j = read_sidecar(path);
    check_dtype(j, path);
    const GridGeom geom = parse_geom(j, path);
    const auto raw = read_raw_i16(path, geom.voxel_count());

    CtVolume vol;
    vol.grid.geom = geom;
    vol.grid.voxels.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i)
        vol.grid.voxels[i] = std::clamp(static_cast<double>(raw[i]), kHuMin, kHuMax);
    return vol;
}

SegVolume load_seg_volume(const std::filesystem::path& path) {
    const json j = read_sidecar(path);
    check_dtype(j, path);
    const GridGeom geom = parse_geom(j, path);

    SegVolume seg;
    seg.grid.geom = geom;
    seg.grid.voxels = read_raw_i16(path, geom.voxel_count());
    if (j.contains("labels")) {
        for (const auto& [key, name] : j.at("labels").items())
            seg.label_names[std::stoi(key)] = name.get<std::string>();
    }
    return seg;
}

void save_volume(const CtVolume& vol, const std::filesystem::path& path) {
    std::vector<std::int16_t> raw(vol.grid.voxels.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const double v = std::clamp(vol.grid.voxels[i], kHuMin, kHuMax);
        raw[i] = static_cast<std::int16_t>(std::lround(v));
    }
    write_raw_i16(path, raw);

    std::ofstream meta(sidecar_path(path), std::ios::trunc);
    meta << geom_to_json(vol.grid.geom).dump(2) << "\n";
    if (!meta) throw std::runtime_error("cannot write sidecar for " + path.string());
}

void save_seg_volume(const SegVolume& seg, const std::filesystem::path& path) {
    write_raw_i16(path, seg.grid.voxels);

    json j = geom_to_json(seg.grid.geom);
    json labels = json::object();
    for (const auto& [id, name] : seg.label_names) labels[std::to_string(id)] = name;
    j["labels"] = labels;

    std::ofstream meta(sidecar_path(path), std::ios::trunc);
    meta << j.dump(2) << "\n";
    if (!meta) throw std::runtime_error("cannot write sidecar for " + path.string());
}

NormalizedVolume normalize_hu(const CtVolume& vol, double lo, double hi) {
    if (lo >= hi) throw std::invalid_argument("normalize_hu: window lo must be < hi");
    NormalizedVolume out;
    out.grid.geom = vol.grid.geom;
    out.grid.voxels.resize(vol.grid.voxels.size());
    const double inv = 1.0 / (hi - lo);
    for (std::size_t i = 0; i < out.grid.voxels.size(); ++i)
        out.grid.voxels[i] = std::clamp((vol.grid.voxels[i] - lo) * inv, 0.0, 1.0);
    return out;
}

}  // namespace nerp
