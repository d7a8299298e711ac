// Copyright 2026 nerp project developers
// SPDX-License-Identifier: Apache-2.0

#include "nerp/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nerp {

double clamp_score(double s) {
    if (!std::isfinite(s)) throw std::invalid_argument("score is not finite");
    return std::clamp(s, kScoreEps, 1.0 - kScoreEps);
}

double l_reg(const Image<double>& gen, const Image<double>& proj) {
    if (!gen.same_shape(proj)) throw std::invalid_argument("l_reg: shape mismatch");
    if (gen.data.empty()) throw std::invalid_argument("l_reg: empty image");
    double sum = 0.0;
    for (std::size_t i = 0; i < gen.data.size(); ++i)
        sum += std::abs(gen.data[i] - proj.data[i]);
    return sum / static_cast<double>(gen.data.size());
}

double l_reg(const Radiograph& gen, const Radiograph& proj) {
    return l_reg(gen.image, proj.image);
}

double adv_loss_d(const ScoreBatch& real, const ScoreBatch& fake) {
    if (real.empty() || fake.empty())
        throw std::invalid_argument("adv_loss_d: empty batch");
    double sum_real = 0.0;
    for (double s : real) sum_real += std::log(clamp_score(s));
    double sum_fake = 0.0;
    for (double s : fake) sum_fake += std::log(1.0 - clamp_score(s));
    return -(sum_real / static_cast<double>(real.size()) +
             sum_fake / static_cast<double>(fake.size()));
}

double adv_loss_g(const ScoreBatch& fake) {
    if (fake.empty()) throw std::invalid_argument("adv_loss_g: empty batch");
    double sum = 0.0;
    for (double s : fake) sum += std::log(clamp_score(s));
    return -sum / static_cast<double>(fake.size());
}

LossValue total_objective(double adv, double reg, double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("total_objective: lambda < 0");
    LossValue v;
    v.adv = adv;
    v.reg = reg;
    v.lambda = lambda;
    v.total = adv + lambda * reg;
    return v;
}

}  // namespace nerp
