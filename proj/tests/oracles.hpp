// Copyright 2026 nerp project developers
// SPDX-License-Identifier: Apache-2.0
//
// Independent reference computations for the tests. Everything here is
// deliberately brute force or closed form and shares no code with the
// library's rendering or traversal paths.

#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "nerp/geometry.hpp"

namespace oracle {

// Emission-absorption through a homogeneous slab of thickness length_mm:
//   I = mu * (1 - exp(-gamma * length_mm))
inline double slab_intensity(double mu, double gamma, double length_mm) {
    return mu * (1.0 - std::exp(-gamma * length_mm));
}

// Transmission through piecewise-homogeneous segments (gamma_i, length_i),
// composited front to back.
inline double segments_intensity(
    const std::vector<std::pair<double, double>>& mu_gamma_lengths_mu,
    const std::vector<double>& lengths) {
    double transmittance = 1.0;
    double intensity = 0.0;
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        const double mu = mu_gamma_lengths_mu[i].first;
        const double gamma = mu_gamma_lengths_mu[i].second;
        const double a = 1.0 - std::exp(-gamma * lengths[i]);
        intensity += transmittance * a * mu;
        transmittance *= 1.0 - a;
    }
    return intensity;
}

// Interval of t for which origin + t * dir lies inside box, found by dense
// scanning; resolution is steps subdivisions of [t_lo, t_hi]. Returns false
// when no sampled point is inside.
inline bool scan_interval(const nerp::Vec3& origin, const nerp::Vec3& dir,
                          const nerp::Aabb& box, double t_lo, double t_hi,
                          int steps, double& enter, double& exit) {
    bool found = false;
    enter = 0.0;
    exit = 0.0;
    for (int i = 0; i <= steps; ++i) {
        const double t = t_lo + (t_hi - t_lo) * i / steps;
        const nerp::Vec3 p = origin + dir * t;
        if (box.contains(p)) {
            if (!found) enter = t;
            exit = t;
            found = true;
        }
    }
    return found;
}

// Composite trapezoid rule for a scalar line integral along [t0, t1].
inline double trapezoid_integral(const std::function<double(double)>& f,
                                 double t0, double t1, int steps) {
    double acc = 0.5 * (f(t0) + f(t1));
    for (int i = 1; i < steps; ++i) acc += f(t0 + (t1 - t0) * i / steps);
    return acc * (t1 - t0) / steps;
}

// Emission-absorption integral computed by very fine midpoint quadrature of
// arbitrary field functions; reference for convergence checks.
inline double dense_ea(const std::function<double(double)>& mu,
                       const std::function<double(double)>& gamma, double t0,
                       double t1, int steps) {
    const double delta = (t1 - t0) / steps;
    double transmittance = 1.0;
    double intensity = 0.0;
    for (int i = 0; i < steps; ++i) {
        const double t = t0 + (i + 0.5) * delta;
        const double a = 1.0 - std::exp(-gamma(t) * delta);
        intensity += transmittance * a * mu(t);
        transmittance *= 1.0 - a;
    }
    return intensity;
}

}  // namespace oracle
