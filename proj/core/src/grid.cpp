#include "hsiseg/grid.hpp"

#include <cmath>

namespace hsiseg {

ScoreMap::ScoreMap(std::size_t height, std::size_t width, std::vector<double> scores)
    : ScoreMap(Grid<double>(height, width, std::move(scores))) {}

ScoreMap::ScoreMap(Grid<double> scores) : grid_(std::move(scores)) {
    for (double v : grid_) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
            throw std::invalid_argument("score map value out of [0,1]: " + std::to_string(v));
        }
    }
}

BinaryMask threshold_scores(const ScoreMap& scores, double threshold) {
    BinaryMask out(scores.height(), scores.width());
    auto src = scores.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] > threshold ? 1 : 0;
    return out;
}

}  // namespace hsiseg
