// Copyright 2026 nerp project developers
// SPDX-License-Identifier: Apache-2.0
//
// Command line front end: render single views, generate paired datasets,
// run gradient and oracle self-checks, and rasterize phantoms.
// Exit codes: 0 success, 1 usage or runtime error, 2 tolerance failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>
#include <json.hpp>

#include "nerp/gradient.hpp"
#include "nerp/image_io.hpp"
#include "nerp/phantom.hpp"
#include "nerp/pipeline.hpp"
#include "nerp/projector.hpp"
#include "nerp/siddon.hpp"
#include "nerp/volume_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Values from --config fill in flags the user did not pass on the command
// line; explicit flags always win.
struct ConfigFile {
    json data;

    void load(const fs::path& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open config: " + path.string());
        try {
            data = json::parse(in);
        } catch (const json::exception& e) {
            throw std::runtime_error("garbled config " + path.string() + ": " +
                                     e.what());
        }
        if (!data.is_object())
            throw std::runtime_error("config must be a JSON object: " + path.string());
    }

    template <typename T>
    void apply(const CLI::Option* opt, T& var, const std::string& key) const {
        if (!data.is_object() || opt->count() > 0) return;
        const auto it = data.find(key);
        if (it == data.end()) return;
        try {
            var = it->get<T>();
        } catch (const json::exception& e) {
            throw std::runtime_error("config key '" + key + "': " + e.what());
        }
    }
};

void set_threads(int threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

nerp::TransferPair pick_transfer(const std::string& preset,
                                 const std::string& tf_file) {
    if (!tf_file.empty()) return nerp::load_tf_pair(tf_file);
    return nerp::tf_preset(preset);
}

nerp::Vec3 vec_from_zyx(const std::vector<double>& zyx) {
    return {zyx[2], zyx[1], zyx[0]};
}

struct RenderArgs {
    std::string volume;
    std::string seg;
    std::string out = "render.png";
    std::string mask_out;
    std::string mode = "ea";
    std::string tf_name = "bone";
    std::string tf_file;
    int samples = 512;
    int rows = 256;
    int cols = 256;
    double fov = 15.0;
    double yaw = 0.0;
    double pitch = 0.0;
    double roll = 0.0;
    double distance = 1000.0;
    std::vector<double> target;  // [z, y, x]; empty = volume center
    double tone = 1.0;
    double tau = 0.05;
    bool path_occupancy = false;
};

int run_render(const RenderArgs& a) {
    const nerp::CtVolume ct = nerp::load_volume(a.volume);
    const nerp::TransferPair tf = pick_transfer(a.tf_name, a.tf_file);
    const nerp::RadianceVolume rv =
        nerp::map_fields(nerp::normalize_hu(ct), tf.mu, tf.gamma);

    nerp::Camera cam;
    cam.pose.target = a.target.empty() ? rv.bounds().center() : vec_from_zyx(a.target);
    cam.pose.yaw_deg = a.yaw;
    cam.pose.pitch_deg = a.pitch;
    cam.pose.roll_deg = a.roll;
    cam.pose.distance_mm = a.distance;
    cam.fov_deg = a.fov;
    cam.rows = a.rows;
    cam.cols = a.cols;

    nerp::RenderOptions opts;
    opts.mode = nerp::parse_render_mode(a.mode);
    opts.samples = a.samples;
    opts.tone_scale = a.tone;

    const nerp::Radiograph radiograph = nerp::render(rv, cam, opts);
    const fs::path out_path(a.out);
    if (out_path.extension() == ".pgm") {
        nerp::write_pgm16(radiograph.image, out_path);
    } else {
        nerp::write_png_gray16(radiograph.image, out_path);
    }
    std::cout << "wrote " << out_path.string() << " (" << a.rows << "x" << a.cols
              << " " << a.mode << ", " << a.samples << " samples)\n";

    if (!a.mask_out.empty()) {
        if (a.seg.empty())
            throw std::runtime_error("--mask-out requires --seg");
        const nerp::SegVolume seg = nerp::load_seg_volume(a.seg);
        const nerp::MaskImage mask = nerp::project_labels(
            seg, rv, cam, a.samples, a.tau,
            a.path_occupancy ? nerp::LabelWeightMode::PathLength
                             : nerp::LabelWeightMode::EaWeights);
        nerp::write_png_palette8(mask.labels, a.mask_out);
        std::cout << "wrote " << a.mask_out << "\n";
    }
    return 0;
}

struct DatasetArgs {
    std::vector<std::string> volumes;
    std::vector<std::string> segs;
    std::string out = "dataset";
    int views = 10;
    std::uint64_t seed = 0;
    std::string mode = "ea";
    std::string tf_name = "bone";
    std::string tf_file;
    int samples = 512;
    int rows = 256;
    int cols = 256;
    double fov = 15.0;
    double distance = 1000.0;
    double prox_yaw = 10.0;
    double prox_pitch = 10.0;
    double prox_roll = 5.0;
    double prox_distance = 0.10;
    double prox_fov = 5.0;
    double tone = 1.0;
    double tau = 0.05;
    bool use_pgm = false;
};

int run_dataset(const DatasetArgs& a) {
    if (!a.segs.empty() && a.segs.size() != a.volumes.size())
        throw std::runtime_error("--seg count must match --volume count");

    nerp::DatasetConfig cfg;
    for (std::size_t i = 0; i < a.volumes.size(); ++i) {
        nerp::VolumeRef ref;
        ref.ct_path = a.volumes[i];
        if (!a.segs.empty() && !a.segs[i].empty() && a.segs[i] != "-")
            ref.seg_path = a.segs[i];
        cfg.volumes.push_back(std::move(ref));
    }
    cfg.out_dir = a.out;
    cfg.views = a.views;
    cfg.seed = a.seed;
    cfg.base_pose.distance_mm = a.distance;
    cfg.fov_deg = a.fov;
    cfg.rows = a.rows;
    cfg.cols = a.cols;
    cfg.prox = {a.prox_yaw, a.prox_pitch, a.prox_roll, a.prox_distance, a.prox_fov};
    cfg.tf_name = a.tf_name;
    if (!a.tf_file.empty()) cfg.tf_path = a.tf_file;
    cfg.render.mode = nerp::parse_render_mode(a.mode);
    cfg.render.samples = a.samples;
    cfg.render.tone_scale = a.tone;
    cfg.label_tau = a.tau;
    cfg.use_pgm = a.use_pgm;

    const nerp::DatasetResult result = nerp::generate_dataset(cfg);
    std::cout << "rendered " << result.rendered_views << " views from "
              << (cfg.volumes.size() - result.failed_volumes) << "/"
              << cfg.volumes.size() << " volumes\n";
    for (const nerp::ManifestRecord& rec : result.records)
        if (!rec.error.empty())
            std::cout << "skipped " << rec.volume_id << ": " << rec.error << "\n";
    std::cout << "manifest: " << result.manifest_path.string() << "\n";
    return result.failed_volumes == 0 ? 0 : 1;
}

struct GradcheckArgs {
    std::string phantom = "smooth-noise";
    int probes = 100;
    int samples = 256;
    int rays = 16;  // ray grid is rays x rays
    double step = 1e-4;
    double tol_mu = 1e-4;
    double tol_gamma = 1e-3;
    std::uint64_t seed = 0;
};

int run_gradcheck(const GradcheckArgs& a) {
    const nerp::RadianceVolume rv = nerp::phantom_radiance(a.phantom, a.seed);

    nerp::Camera cam;
    cam.pose.target = rv.bounds().center();
    cam.pose.distance_mm = 300.0;
    cam.fov_deg = 25.0;
    cam.rows = a.rays;
    cam.cols = a.rays;
    const nerp::RayBundle bundle = nerp::generate_rays(cam, rv.bounds());

    const nerp::GradCheckReport rep = nerp::grad_check(
        rv, bundle.rays, a.samples, a.step, a.probes, a.seed + 1);

    std::printf("gradcheck: phantom=%s probes=%d h=%g samples=%d seed=%llu\n",
                a.phantom.c_str(), a.probes, a.step, a.samples,
                static_cast<unsigned long long>(a.seed));
    std::printf("  d_mu   : max_rel=%.3e mean_rel=%.3e (tol %.1e, %d probes)\n",
                rep.max_rel_mu, rep.mean_rel_mu, a.tol_mu, rep.probes_mu);
    std::printf("  d_gamma: max_rel=%.3e mean_rel=%.3e (tol %.1e, %d probes)\n",
                rep.max_rel_gamma, rep.mean_rel_gamma, a.tol_gamma,
                rep.probes_gamma);
    std::printf("  min dI/dmu = %.3e (must stay >= 0)\n", rep.min_d_mu);

    const bool ok = rep.max_rel_mu <= a.tol_mu &&
                    rep.max_rel_gamma <= a.tol_gamma && rep.min_d_mu >= 0.0;
    std::printf("%s\n", ok ? "PASS" : "FAIL");
    return ok ? 0 : 2;
}

struct OracleArgs {
    std::string phantom = "gauss-blob";
    int samples = 512;
    int rows = 256;
    int cols = 256;
    double fov = 20.0;
    double distance = 400.0;
    double max_tol = 0.02;
    double mean_tol = 0.005;
    std::string out_render;
    std::string out_oracle;
    std::string out_radiological;
};

int run_oracle_diff(const OracleArgs& a) {
    const nerp::RadianceVolume rv = nerp::phantom_radiance(a.phantom, 0);

    nerp::Camera cam;
    cam.pose.target = rv.bounds().center();
    cam.pose.distance_mm = a.distance;
    cam.fov_deg = a.fov;
    cam.rows = a.rows;
    cam.cols = a.cols;

    nerp::RenderOptions opts;
    opts.samples = a.samples;
    const nerp::Radiograph ea = nerp::render(rv, cam, opts);
    const nerp::Radiograph oracle = nerp::siddon_project(rv, cam);
    const nerp::DiffStats stats = nerp::image_diff(ea.image, oracle.image);

    if (!a.out_render.empty()) nerp::write_png_gray16(ea.image, a.out_render);
    if (!a.out_oracle.empty()) nerp::write_png_gray16(oracle.image, a.out_oracle);
    if (!a.out_radiological.empty()) {
        nerp::Image<double> rad = nerp::siddon_radiological(rv, cam);
        double peak = 0.0;
        for (double v : rad.data) peak = std::max(peak, v);
        if (peak > 0.0)
            for (double& v : rad.data) v /= peak;
        nerp::write_png_gray16(rad, a.out_radiological);
    }

    std::printf("oracle-diff: phantom=%s samples=%d %dx%d\n", a.phantom.c_str(),
                a.samples, a.rows, a.cols);
    std::printf("  |render - oracle|: max=%.6f mean=%.6f p99=%.6f\n",
                stats.max_abs, stats.mean_abs, stats.p99_abs);
    std::printf("  tolerances: max<=%g mean<=%g\n", a.max_tol, a.mean_tol);

    const bool ok = stats.max_abs <= a.max_tol && stats.mean_abs <= a.mean_tol;
    std::printf("%s\n", ok ? "PASS" : "FAIL");
    return ok ? 0 : 2;
}

struct PhantomArgs {
    std::string preset;
    std::string spec_file;
    std::string out = "phantom";
};

int run_phantom(const PhantomArgs& a) {
    if (a.preset.empty() == a.spec_file.empty())
        throw std::runtime_error("pass exactly one of --preset or --spec");
    const nerp::PhantomSpec spec = a.spec_file.empty()
                                       ? nerp::phantom_preset(a.preset)
                                       : nerp::load_phantom_spec(a.spec_file);
    const nerp::Phantom ph = nerp::make_phantom(spec);

    const fs::path ct_path = a.out + ".raw";
    nerp::save_volume(ph.ct, ct_path);
    std::cout << "wrote " << ct_path.string() << " (" << spec.geom.nx << "x"
              << spec.geom.ny << "x" << spec.geom.nz << " int16) + sidecar\n";
    if (ph.has_labels) {
        const fs::path seg_path = a.out + "_seg.raw";
        nerp::save_seg_volume(ph.seg, seg_path);
        std::cout << "wrote " << seg_path.string() << " + sidecar\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CT-to-radiograph projection toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    int threads = 0;
    app.add_option("--config", config_path, "JSON config supplying flag defaults");
    app.add_option("--threads", threads, "OpenMP thread count (0 = library default)");

    RenderArgs ra;
    CLI::App* render = app.add_subcommand("render", "Render one radiograph");
    auto* r_volume = render->add_option("--volume", ra.volume, "CT volume (.raw)")
                         ->required();
    auto* r_seg = render->add_option("--seg", ra.seg, "Segmentation volume (.raw)");
    auto* r_out = render->add_option("--out", ra.out, "Output image (.png or .pgm)");
    auto* r_mask = render->add_option("--mask-out", ra.mask_out, "Output label mask (.png)");
    auto* r_mode = render->add_option("--mode", ra.mode, "ea | aip | mip");
    auto* r_samples = render->add_option("--samples", ra.samples, "Samples per ray");
    auto* r_rows = render->add_option("--rows", ra.rows, "Image rows");
    auto* r_cols = render->add_option("--cols", ra.cols, "Image cols");
    auto* r_fov = render->add_option("--fov", ra.fov, "Vertical field of view, degrees");
    auto* r_yaw = render->add_option("--yaw", ra.yaw, "Pose yaw, degrees");
    auto* r_pitch = render->add_option("--pitch", ra.pitch, "Pose pitch, degrees");
    auto* r_roll = render->add_option("--roll", ra.roll, "Pose roll, degrees");
    auto* r_dist = render->add_option("--distance", ra.distance, "Source distance, mm");
    render->add_option("--target", ra.target, "Look-at point [z,y,x] mm")
        ->delimiter(',')
        ->expected(3);
    auto* r_tfp = render->add_option("--tf-preset", ra.tf_name, "Transfer preset name");
    auto* r_tff = render->add_option("--tf", ra.tf_file, "Transfer pair JSON file");
    auto* r_tone = render->add_option("--tone-scale", ra.tone, "Linear tone scale");
    auto* r_tau = render->add_option("--tau", ra.tau, "Mask occupancy threshold");
    render->add_flag("--path-occupancy", ra.path_occupancy,
                     "Mask occupancy from path length instead of render weights");

    DatasetArgs da;
    CLI::App* dataset = app.add_subcommand("dataset", "Render a paired dataset");
    dataset->add_option("--volume", da.volumes, "CT volume (repeatable)")
        ->required();
    dataset->add_option("--seg", da.segs,
                        "Segmentation per volume, '-' to skip (repeatable)");
    auto* d_out = dataset->add_option("--out", da.out, "Output directory");
    auto* d_views = dataset->add_option("--views", da.views, "Views per volume");
    auto* d_seed = dataset->add_option("--seed", da.seed, "Base seed");
    auto* d_mode = dataset->add_option("--mode", da.mode, "ea | aip | mip");
    auto* d_samples = dataset->add_option("--samples", da.samples, "Samples per ray");
    auto* d_rows = dataset->add_option("--rows", da.rows, "Image rows");
    auto* d_cols = dataset->add_option("--cols", da.cols, "Image cols");
    auto* d_fov = dataset->add_option("--fov", da.fov, "Base field of view, degrees");
    auto* d_dist = dataset->add_option("--distance", da.distance, "Base distance, mm");
    auto* d_py = dataset->add_option("--prox-yaw", da.prox_yaw, "Yaw half-width, degrees");
    auto* d_pp = dataset->add_option("--prox-pitch", da.prox_pitch, "Pitch half-width, degrees");
    auto* d_pr = dataset->add_option("--prox-roll", da.prox_roll, "Roll half-width, degrees");
    auto* d_pd = dataset->add_option("--prox-distance", da.prox_distance,
                                     "Distance half-width, fraction");
    auto* d_pf = dataset->add_option("--prox-fov", da.prox_fov, "FOV half-width, degrees");
    auto* d_tfp = dataset->add_option("--tf-preset", da.tf_name, "Transfer preset name");
    auto* d_tff = dataset->add_option("--tf", da.tf_file, "Transfer pair JSON file");
    auto* d_tone = dataset->add_option("--tone-scale", da.tone, "Linear tone scale");
    auto* d_tau = dataset->add_option("--tau", da.tau, "Mask occupancy threshold");
    dataset->add_flag("--pgm", da.use_pgm, "Write radiographs as PGM");

    GradcheckArgs ga;
    CLI::App* gradcheck =
        app.add_subcommand("gradcheck", "Finite-difference gradient check");
    auto* g_phantom = gradcheck->add_option("--phantom", ga.phantom,
                                            "Phantom field (smooth-noise, gauss-blob, ...)");
    auto* g_probes = gradcheck->add_option("--probes", ga.probes, "Probe count");
    auto* g_samples = gradcheck->add_option("--samples", ga.samples, "Samples per ray");
    auto* g_rays = gradcheck->add_option("--rays", ga.rays, "Ray grid side length");
    auto* g_step = gradcheck->add_option("--step", ga.step, "Central difference step");
    auto* g_tmu = gradcheck->add_option("--tol-mu", ga.tol_mu, "Matter tolerance");
    auto* g_tga = gradcheck->add_option("--tol-gamma", ga.tol_gamma, "Opacity tolerance");
    auto* g_seed = gradcheck->add_option("--seed", ga.seed, "Seed");

    OracleArgs oa;
    CLI::App* oracle =
        app.add_subcommand("oracle-diff", "Compare renderer against exact traversal");
    auto* o_phantom = oracle->add_option("--phantom", oa.phantom, "Phantom field");
    auto* o_samples = oracle->add_option("--samples", oa.samples, "Samples per ray");
    auto* o_rows = oracle->add_option("--rows", oa.rows, "Image rows");
    auto* o_cols = oracle->add_option("--cols", oa.cols, "Image cols");
    auto* o_fov = oracle->add_option("--fov", oa.fov, "Field of view, degrees");
    auto* o_dist = oracle->add_option("--distance", oa.distance, "Distance, mm");
    auto* o_max = oracle->add_option("--max-tol", oa.max_tol, "Max abs tolerance");
    auto* o_mean = oracle->add_option("--mean-tol", oa.mean_tol, "Mean abs tolerance");
    oracle->add_option("--out-render", oa.out_render, "Write renderer image");
    oracle->add_option("--out-oracle", oa.out_oracle, "Write oracle image");
    oracle->add_option("--out-radiological", oa.out_radiological,
                       "Write normalized radiological path image");

    PhantomArgs pa;
    CLI::App* phantom = app.add_subcommand("phantom", "Rasterize a phantom volume");
    phantom->add_option("--preset", pa.preset, "Preset name");
    phantom->add_option("--spec", pa.spec_file, "Phantom spec JSON");
    phantom->add_option("--out", pa.out, "Output basename");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        ConfigFile cfg;
        if (!config_path.empty()) cfg.load(config_path);
        cfg.apply(app.get_option("--threads"), threads, "threads");
        set_threads(threads);

        if (render->parsed()) {
            cfg.apply(r_volume, ra.volume, "volume");
            cfg.apply(r_seg, ra.seg, "seg");
            cfg.apply(r_out, ra.out, "out");
            cfg.apply(r_mask, ra.mask_out, "mask-out");
            cfg.apply(r_mode, ra.mode, "mode");
            cfg.apply(r_samples, ra.samples, "samples");
            cfg.apply(r_rows, ra.rows, "rows");
            cfg.apply(r_cols, ra.cols, "cols");
            cfg.apply(r_fov, ra.fov, "fov");
            cfg.apply(r_yaw, ra.yaw, "yaw");
            cfg.apply(r_pitch, ra.pitch, "pitch");
            cfg.apply(r_roll, ra.roll, "roll");
            cfg.apply(r_dist, ra.distance, "distance");
            cfg.apply(r_tfp, ra.tf_name, "tf-preset");
            cfg.apply(r_tff, ra.tf_file, "tf");
            cfg.apply(r_tone, ra.tone, "tone-scale");
            cfg.apply(r_tau, ra.tau, "tau");
            return run_render(ra);
        }
        if (dataset->parsed()) {
            cfg.apply(d_out, da.out, "out");
            cfg.apply(d_views, da.views, "views");
            cfg.apply(d_seed, da.seed, "seed");
            cfg.apply(d_mode, da.mode, "mode");
            cfg.apply(d_samples, da.samples, "samples");
            cfg.apply(d_rows, da.rows, "rows");
            cfg.apply(d_cols, da.cols, "cols");
            cfg.apply(d_fov, da.fov, "fov");
            cfg.apply(d_dist, da.distance, "distance");
            cfg.apply(d_py, da.prox_yaw, "prox-yaw");
            cfg.apply(d_pp, da.prox_pitch, "prox-pitch");
            cfg.apply(d_pr, da.prox_roll, "prox-roll");
            cfg.apply(d_pd, da.prox_distance, "prox-distance");
            cfg.apply(d_pf, da.prox_fov, "prox-fov");
            cfg.apply(d_tfp, da.tf_name, "tf-preset");
            cfg.apply(d_tff, da.tf_file, "tf");
            cfg.apply(d_tone, da.tone, "tone-scale");
            cfg.apply(d_tau, da.tau, "tau");
            return run_dataset(da);
        }
        if (gradcheck->parsed()) {
            cfg.apply(g_phantom, ga.phantom, "phantom");
            cfg.apply(g_probes, ga.probes, "probes");
            cfg.apply(g_samples, ga.samples, "samples");
            cfg.apply(g_rays, ga.rays, "rays");
            cfg.apply(g_step, ga.step, "step");
            cfg.apply(g_tmu, ga.tol_mu, "tol-mu");
            cfg.apply(g_tga, ga.tol_gamma, "tol-gamma");
            cfg.apply(g_seed, ga.seed, "seed");
            return run_gradcheck(ga);
        }
        if (oracle->parsed()) {
            cfg.apply(o_phantom, oa.phantom, "phantom");
            cfg.apply(o_samples, oa.samples, "samples");
            cfg.apply(o_rows, oa.rows, "rows");
            cfg.apply(o_cols, oa.cols, "cols");
            cfg.apply(o_fov, oa.fov, "fov");
            cfg.apply(o_dist, oa.distance, "distance");
            cfg.apply(o_max, oa.max_tol, "max-tol");
            cfg.apply(o_mean, oa.mean_tol, "mean-tol");
            return run_oracle_diff(oa);
        }
        if (phantom->parsed()) return run_phantom(pa);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
