// Copyright 2026 nerp project developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "nerp/image.hpp"

namespace nerp {

// Discriminator scores are clamped into [kScoreEps, 1 - kScoreEps] before any
// logarithm so the losses stay finite.
inline constexpr double kScoreEps = 1e-7;

using ScoreBatch = std::vector<double>;

double clamp_score(double s);

// Mean absolute difference between two images of equal shape.
double l_reg(const Image<double>& gen, const Image<double>& proj);
double l_reg(const Radiograph& gen, const Radiograph& proj);

// Minimax discriminator loss:
//   -(mean log D(real) + mean log(1 - D(fake)))
// Both batches must be non-empty.
double adv_loss_d(const ScoreBatch& real, const ScoreBatch& fake);

// Non-saturating generator loss: -mean log D(fake).
double adv_loss_g(const ScoreBatch& fake);

struct LossValue {
    double total = 0.0;
    double adv = 0.0;
    double reg = 0.0;
    double lambda = 0.0;
};

// total = adv + lambda * reg; lambda must be >= 0.
LossValue total_objective(double adv, double reg, double lambda = 1.0);

}  // namespace nerp
