#include "hsiseg/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hsiseg {
namespace {

void check(const ScoreMap& probs, const BinaryMask& target, const BinaryMask& valid) {
    if (!probs.same_shape(target) || !probs.same_shape(valid)) {
        throw std::invalid_argument("loss inputs have mismatched dimensions");
    }
}

}  // namespace

double soft_dice_loss(const ScoreMap& probs, const BinaryMask& target, const BinaryMask& valid,
                      double epsilon) {
    check(probs, target, valid);
    double inter = 0.0, sum_p = 0.0, sum_g = 0.0;
    auto p = probs.values();
    auto g = target.values();
    auto v = valid.values();
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!v[i]) continue;
        const double gi = g[i] ? 1.0 : 0.0;
        inter += p[i] * gi;
        sum_p += p[i];
        sum_g += gi;
    }
    return 1.0 - (2.0 * inter + epsilon) / (sum_p + sum_g + epsilon);
}

double bce_loss(const ScoreMap& probs, const BinaryMask& target, const BinaryMask& valid,
                double clamp) {
    check(probs, target, valid);
    double total = 0.0;
    std::size_t n = 0;
    auto p = probs.values();
    auto g = target.values();
    auto v = valid.values();
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!v[i]) continue;
        const double q = std::clamp(p[i], clamp, 1.0 - clamp);
        total -= g[i] ? std::log(q) : std::log(1.0 - q);
        ++n;
    }
    return n == 0 ? 0.0 : total / static_cast<double>(n);
}

LossBreakdown combine(double dice_loss, double bce_loss, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw std::invalid_argument("loss weight lambda must lie in [0, 1]");
    }
    return {dice_loss, bce_loss, lambda * dice_loss + (1.0 - lambda) * bce_loss, lambda};
}

LossBreakdown combined_loss(const ScoreMap& probs, const BinaryMask& target,
                            const BinaryMask& valid, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw std::invalid_argument("loss weight lambda must lie in [0, 1]");
    }
    return combine(soft_dice_loss(probs, target, valid), bce_loss(probs, target, valid), lambda);
}

double session_mean_loss(std::span<const LossBreakdown> per_step) {
    if (per_step.empty()) throw std::invalid_argument("session has no steps");
    double sum = 0.0;
    for (const auto& step : per_step) sum += step.combined;
    return sum / static_cast<double>(per_step.size());
}

}  // namespace hsiseg
