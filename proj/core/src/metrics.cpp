#include "hsiseg/metrics.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace hsiseg {
namespace {

template <typename A, typename B, typename C>
void check_shapes(const A& a, const B& b, const C& c) {
    if (!a.same_shape(b) || !a.same_shape(c)) {
        throw std::invalid_argument("mask dimensions do not match");
    }
}

}  // namespace

ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& gt, const BinaryMask& valid) {
    check_shapes(pred, gt, valid);
    ConfusionCounts out;
    auto p = pred.values(), g = gt.values(), v = valid.values();
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!v[i]) continue;
        if (p[i] && g[i]) ++out.tp;
        else if (p[i]) ++out.fp;
        else if (g[i]) ++out.fn;
    }
    return out;
}

double dice_from_counts(const ConfusionCounts& counts) {
    const std::size_t denom = 2 * counts.tp + counts.fp + counts.fn;
    if (denom == 0) return 1.0;
    return static_cast<double>(2 * counts.tp) / static_cast<double>(denom);
}

double dice(const BinaryMask& pred, const BinaryMask& gt, const BinaryMask& valid) {
    return dice_from_counts(confusion(pred, gt, valid));
}

DiceF1 dice_f1_check(const BinaryMask& pred, const BinaryMask& gt, const BinaryMask& valid) {
    check_shapes(pred, gt, valid);
    std::size_t pred_n = 0, gt_n = 0, overlap = 0;
    auto p = pred.values(), g = gt.values(), v = valid.values();
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!v[i]) continue;
        pred_n += p[i] ? 1 : 0;
        gt_n += g[i] ? 1 : 0;
        overlap += (p[i] && g[i]) ? 1 : 0;
    }
    DiceF1 out{1.0, 1.0};
    if (pred_n + gt_n > 0) {
        out.dice = 2.0 * static_cast<double>(overlap) / static_cast<double>(pred_n + gt_n);
    }

    const ConfusionCounts c = confusion(pred, gt, valid);
    if (c.tp + c.fp + c.fn > 0) {
        if (c.tp == 0) {
            out.f1 = 0.0;
        } else {
            const double precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
            const double recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
            out.f1 = 2.0 * precision * recall / (precision + recall);
        }
    }
    return out;
}

DiceAtMax dice_at_max(const ScoreMap& scores, const BinaryMask& gt, const BinaryMask& valid) {
    check_shapes(gt, valid, scores.grid());

    struct Entry {
        double score;
        bool fg;
    };
    std::vector<Entry> entries;
    std::size_t total_fg = 0;
    auto s = scores.values();
    auto g = gt.values();
    auto v = valid.values();
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!v[i]) continue;
        entries.push_back({s[i], g[i] != 0});
        total_fg += g[i] ? 1 : 0;
    }
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.score > b.score; });

    // Walk tau downward through the distinct score values. At tau = value, the
    // prediction is every pixel strictly above it, i.e. everything consumed so far.
    DiceAtMax best{-1.0, 0.0};
    ConfusionCounts counts{0, 0, total_fg};
    auto consider = [&](double tau) {
        const double d = dice_from_counts(counts);
        if (d > best.dice) best = {d, tau};
    };
    std::size_t i = 0;
    while (i < entries.size()) {
        const double tau = entries[i].score;
        consider(tau);
        for (; i < entries.size() && entries[i].score == tau; ++i) {
            if (entries[i].fg) {
                ++counts.tp;
                --counts.fn;
            } else {
                ++counts.fp;
            }
        }
    }
    if (entries.empty() || entries.back().score > 0.0) consider(0.0);
    return best;
}

}  // namespace hsiseg
