#pragma once

#include <cstddef>

#include "hsiseg/grid.hpp"

namespace hsiseg {

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
};

/// TP/FP/FN over pixels where `valid` is set. Throws std::invalid_argument on
/// mismatched dimensions.
ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& gt, const BinaryMask& valid);

/// 2TP / (2TP + FP + FN); 1.0 when prediction and target are both empty.
double dice_from_counts(const ConfusionCounts& counts);

/// Dice over valid pixels only.
double dice(const BinaryMask& pred, const BinaryMask& gt, const BinaryMask& valid);

struct DiceF1 {
    double dice;
    double f1;
};

/// Computes Dice from set overlap (2|P∩G| / (|P| + |G|)) and F1 from
/// precision and recall, independently. The two agree by algebra.
DiceF1 dice_f1_check(const BinaryMask& pred, const BinaryMask& gt, const BinaryMask& valid);

struct DiceAtMax {
    double dice = 0.0;
    double best_tau = 0.0;
};

/// Maximum of dice({scores > tau}, gt, valid) over all tau in [0, 1].
///
/// Only the cuts tau in {0} ∪ {score values} produce distinct predictions, so
/// valid pixels are sorted by descending score and swept once. `best_tau` is
/// the largest such tau reaching the maximum.
DiceAtMax dice_at_max(const ScoreMap& scores, const BinaryMask& gt, const BinaryMask& valid);

}  // namespace hsiseg
