// Copyright 2026 nerp project developers
// SPDX-License-Identifier: Apache-2.0

#include "nerp/gradient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "nerp/rng.hpp"

namespace nerp {

namespace {

std::vector<std::pair<std::size_t, double>> sorted_entries(
    const std::unordered_map<std::size_t, double>& acc) {
    std::vector<std::pair<std::size_t, double>> out(acc.begin(), acc.end());
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

}  // namespace

PixelGradient grad_pixel(const RadianceVolume& rv, const Ray& ray, int n) {
    if (n < 2) throw std::invalid_argument("grad_pixel: need at least 2 samples");
    PixelGradient out;
    if (!ray.hits()) return out;

    const double delta = (ray.t_far - ray.t_near) / n;
    std::vector<TriStencil> stencils(n);
    std::vector<double> mu(n), weight(n), trans_after(n);

    // Forward pass, identical arithmetic to march_ray.
    double transmittance = 1.0;
    double intensity = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = ray.t_near + (i + 0.5) * delta;
        const TriStencil st = rv.matter.stencil(ray.at(t));
        double m = 0.0;
        double g = 0.0;
        for (int k = 0; k < st.count; ++k) {
            m += st.w[k] * rv.matter.voxels[st.idx[k]];
            g += st.w[k] * rv.opacity.voxels[st.idx[k]];
        }
        const double alpha = -std::expm1(-g * delta);
        const double w = transmittance * alpha;
        intensity += w * m;
        transmittance -= w;
        stencils[i] = st;
        mu[i] = m;
        weight[i] = w;
        trans_after[i] = transmittance;
    }
    out.value = intensity;
    out.transmittance = transmittance;

    // Backward pass with a running suffix sum S_i = sum_{j>i} w_j mu_j.
    std::unordered_map<std::size_t, double> acc_mu, acc_gamma;
    double suffix = 0.0;
    for (int i = n - 1; i >= 0; --i) {
        const double d_mu_i = weight[i];
        const double d_gamma_i = delta * (trans_after[i] * mu[i] - suffix);
        const TriStencil& st = stencils[i];
        for (int k = 0; k < st.count; ++k) {
            acc_mu[st.idx[k]] += d_mu_i * st.w[k];
            acc_gamma[st.idx[k]] += d_gamma_i * st.w[k];
        }
        suffix += weight[i] * mu[i];
    }
    out.d_mu = sorted_entries(acc_mu);
    out.d_gamma = sorted_entries(acc_gamma);
    return out;
}

GradCheckReport grad_check(const RadianceVolume& rv,
                           const std::vector<Ray>& rays, int n, double h,
                           int probes, std::uint64_t seed) {
    if (rays.empty()) throw std::invalid_argument("grad_check: no rays");
    if (!(h > 0.0)) throw std::invalid_argument("grad_check: h must be > 0");
    if (probes < 1) throw std::invalid_argument("grad_check: probes must be >= 1");

    RadianceVolume work = rv;
    Rng rng(seed);
    GradCheckReport rep;
    rep.min_d_mu = std::numeric_limits<double>::infinity();
    double sum_mu = 0.0;
    double sum_gamma = 0.0;

    const auto central = [&](std::vector<double>& field, std::size_t v,
                             const Ray& ray) {
        const double saved = field[v];
        field[v] = saved + h;
        const double fp = march_ray(work, ray, n).value;
        field[v] = saved - h;
        const double fm = march_ray(work, ray, n).value;
        field[v] = saved;
        return (fp - fm) / (2.0 * h);
    };
    const auto rel_err = [](double a, double fd) {
        return std::abs(a - fd) / std::max({std::abs(a), std::abs(fd), 1e-6});
    };

    int done = 0;
    const int max_attempts = probes * 16;
    for (int attempt = 0; attempt < max_attempts && done < probes; ++attempt) {
        const Ray& ray = rays[rng.next_u64() % rays.size()];
        const PixelGradient g = grad_pixel(work, ray, n);
        if (g.d_mu.empty()) continue;  // ray misses the volume

        for (const auto& e : g.d_mu) rep.min_d_mu = std::min(rep.min_d_mu, e.second);

        const auto& [v_mu, a_mu] = g.d_mu[rng.next_u64() % g.d_mu.size()];
        const double r_mu = rel_err(a_mu, central(work.matter.voxels, v_mu, ray));
        rep.max_rel_mu = std::max(rep.max_rel_mu, r_mu);
        sum_mu += r_mu;
        ++rep.probes_mu;

        const auto& [v_ga, a_ga] = g.d_gamma[rng.next_u64() % g.d_gamma.size()];
        const double r_ga = rel_err(a_ga, central(work.opacity.voxels, v_ga, ray));
        rep.max_rel_gamma = std::max(rep.max_rel_gamma, r_ga);
        sum_gamma += r_ga;
        ++rep.probes_gamma;
        ++done;
    }
    if (done == 0) throw std::runtime_error("grad_check: no ray hit the volume");
    rep.mean_rel_mu = sum_mu / rep.probes_mu;
    rep.mean_rel_gamma = sum_gamma / rep.probes_gamma;
    return rep;
}

}  // namespace nerp
