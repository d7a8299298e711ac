// Copyright 2026 nerp project developers
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "nerp/gradient.hpp"
#include "nerp/phantom.hpp"
#include "nerp/rng.hpp"

using nerp::GridGeom;
using nerp::PixelGradient;
using nerp::RadianceVolume;
using nerp::Ray;
using nerp::Vec3;

namespace {

RadianceVolume uniform_volume(int n, double spacing, double mu, double gamma) {
    GridGeom geom;
    geom.nx = geom.ny = geom.nz = n;
    geom.spacing = {spacing, spacing, spacing};
    geom.origin = {spacing / 2, spacing / 2, spacing / 2};
    RadianceVolume rv;
    rv.matter.geom = geom;
    rv.matter.voxels.assign(geom.voxel_count(), mu);
    rv.opacity.geom = geom;
    rv.opacity.voxels.assign(geom.voxel_count(), gamma);
    return rv;
}

Ray clipped_ray(const RadianceVolume& rv, const Vec3& origin, const Vec3& aim) {
    Ray ray;
    ray.origin = origin;
    ray.dir = normalized(aim - origin);
    nerp::SlabHit hit{};
    REQUIRE(nerp::ray_aabb(ray.origin, ray.dir, rv.bounds(), hit));
    ray.t_near = hit.t_near;
    ray.t_far = hit.t_far;
    return ray;
}

const RadianceVolume& noise_volume() {
    static const RadianceVolume rv = nerp::phantom_radiance("smooth-noise", 21);
    return rv;
}

std::vector<Ray> probe_rays(const RadianceVolume& rv, int side) {
    nerp::Camera cam;
    cam.pose.target = rv.bounds().center();
    cam.pose.distance_mm = 300.0;
    cam.fov_deg = 25.0;
    cam.rows = cam.cols = side;
    return nerp::generate_rays(cam, rv.bounds()).rays;
}

}  // namespace

TEST_CASE("forward value of the gradient pass matches march_ray bitwise") {
    const RadianceVolume& rv = noise_volume();
    const std::vector<Ray> rays = probe_rays(rv, 8);
    for (const Ray& ray : rays) {
        if (!ray.hits()) continue;
        const PixelGradient g = nerp::grad_pixel(rv, ray, 128);
        const nerp::MarchResult m = nerp::march_ray(rv, ray, 128);
        CHECK(g.value == m.value);
        CHECK(g.transmittance == m.transmittance);
    }
}

TEST_CASE("matter gradient entries sum to the total weight") {
    // Trilinear weights sum to 1 per sample, so sum_v dI/dmu_v = sum_i w_i.
    const RadianceVolume& rv = noise_volume();
    const std::vector<Ray> rays = probe_rays(rv, 6);
    for (const Ray& ray : rays) {
        if (!ray.hits()) continue;
        const PixelGradient g = nerp::grad_pixel(rv, ray, 96);
        const nerp::MarchResult m = nerp::march_ray(rv, ray, 96, true);
        double w_sum = 0.0;
        for (double w : m.weights) w_sum += w;
        double g_sum = 0.0;
        for (const auto& e : g.d_mu) g_sum += e.second;
        CHECK(g_sum == doctest::Approx(w_sum).epsilon(1e-10));
    }
}

TEST_CASE("matter gradients are nonnegative") {
    const RadianceVolume& rv = noise_volume();
    const std::vector<Ray> rays = probe_rays(rv, 8);
    for (const Ray& ray : rays) {
        if (!ray.hits()) continue;
        const PixelGradient g = nerp::grad_pixel(rv, ray, 64);
        for (const auto& e : g.d_mu) CHECK(e.second >= 0.0);
    }
}

TEST_CASE("homogeneous slab gradients match the analytic derivative") {
    // I(gamma) = mu (1 - e^(-gamma L)); dI/dgamma summed over all voxels
    // must equal mu L e^(-gamma L).
    const double mu = 0.8;
    const double gamma = 0.01;
    const double L = 100.0;
    const RadianceVolume rv = uniform_volume(16, 6.25, mu, gamma);
    const Ray ray = clipped_ray(rv, {-20.0, 50.0, 50.0}, {120.0, 50.0, 50.0});
    const PixelGradient g = nerp::grad_pixel(rv, ray, 2048);

    double d_gamma_total = 0.0;
    for (const auto& e : g.d_gamma) d_gamma_total += e.second;
    CHECK(d_gamma_total ==
          doctest::Approx(mu * L * std::exp(-gamma * L)).epsilon(1e-6));

    // Likewise sum_v dI/dmu_v = sum_i w_i = 1 - e^(-gamma L).
    double d_mu_total = 0.0;
    for (const auto& e : g.d_mu) d_mu_total += e.second;
    CHECK(d_mu_total ==
          doctest::Approx(1.0 - std::exp(-gamma * L)).epsilon(1e-9));
}

TEST_CASE("finite differences confirm analytic gradients on a smooth field") {
    const RadianceVolume& rv = noise_volume();
    const std::vector<Ray> rays = probe_rays(rv, 16);
    const nerp::GradCheckReport rep =
        nerp::grad_check(rv, rays, 256, 1e-4, 120, 99);
    CHECK(rep.probes_mu >= 100);
    CHECK(rep.probes_gamma >= 100);
    CHECK(rep.max_rel_mu <= 1e-4);
    CHECK(rep.max_rel_gamma <= 1e-3);
    CHECK(rep.min_d_mu >= 0.0);
}

TEST_CASE("grad_check is deterministic for a fixed seed") {
    const RadianceVolume& rv = noise_volume();
    const std::vector<Ray> rays = probe_rays(rv, 8);
    const nerp::GradCheckReport a = nerp::grad_check(rv, rays, 64, 1e-4, 20, 5);
    const nerp::GradCheckReport b = nerp::grad_check(rv, rays, 64, 1e-4, 20, 5);
    CHECK(a.max_rel_mu == b.max_rel_mu);
    CHECK(a.mean_rel_gamma == b.mean_rel_gamma);
    const nerp::GradCheckReport c = nerp::grad_check(rv, rays, 64, 1e-4, 20, 6);
    // A different seed draws different probes.
    CHECK((c.max_rel_mu != a.max_rel_mu || c.max_rel_gamma != a.max_rel_gamma));
}

TEST_CASE("grad_check validates its arguments") {
    const RadianceVolume rv = uniform_volume(4, 4.0, 1.0, 0.01);
    std::vector<Ray> rays;
    CHECK_THROWS_AS(nerp::grad_check(rv, rays, 64, 1e-4, 10, 0),
                    std::invalid_argument);
    rays.push_back(clipped_ray(rv, {-10.0, 8.0, 8.0}, {30.0, 8.0, 8.0}));
    CHECK_THROWS_AS(nerp::grad_check(rv, rays, 64, 0.0, 10, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(nerp::grad_check(rv, rays, 64, 1e-4, 0, 0),
                    std::invalid_argument);
}

TEST_CASE("gradient of a miss ray is empty") {
    const RadianceVolume rv = uniform_volume(4, 4.0, 1.0, 0.01);
    Ray miss;
    miss.origin = {100, 100, 100};
    miss.dir = {0, 0, 1};
    miss.t_near = 0.0;
    miss.t_far = -1.0;
    const PixelGradient g = nerp::grad_pixel(rv, miss, 64);
    CHECK(g.value == 0.0);
    CHECK(g.d_mu.empty());
    CHECK(g.d_gamma.empty());
}
