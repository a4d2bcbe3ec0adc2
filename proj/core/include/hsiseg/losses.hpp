#pragma once

#include <span>

#include "hsiseg/grid.hpp"

namespace hsiseg {

/// Per-step training objective.
struct LossBreakdown {
    double dice_loss = 0.0;
    double bce_loss = 0.0;
    double combined = 0.0;
    double lambda = 0.5;
};

/// 1 - (2·Σpg + eps) / (Σp + Σg + eps) over valid pixels.
double soft_dice_loss(const ScoreMap& probs, const BinaryMask& target, const BinaryMask& valid,
                      double epsilon = 1.0);

/// Mean binary cross-entropy over valid pixels with probabilities clamped to
/// [clamp, 1 - clamp]. Zero when no pixel is valid.
double bce_loss(const ScoreMap& probs, const BinaryMask& target, const BinaryMask& valid,
                double clamp = 1e-7);

/// lambda·dice + (1 - lambda)·bce. Throws std::invalid_argument for lambda
/// outside [0, 1].
LossBreakdown combined_loss(const ScoreMap& probs, const BinaryMask& target,
                            const BinaryMask& valid, double lambda = 0.5);

/// Same combination from precomputed components.
LossBreakdown combine(double dice_loss, double bce_loss, double lambda = 0.5);

/// Mean of the combined losses over one class's interaction steps.
double session_mean_loss(std::span<const LossBreakdown> per_step);

}  // namespace hsiseg
