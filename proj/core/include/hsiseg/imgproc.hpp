#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hsiseg/grid.hpp"

namespace hsiseg {

/// Histogram equalization over `bins` uniform bins spanning [min, max] of the
/// input. Output is (cdf(bin) - cdf_min) / (N - cdf_min); a constant map is
/// returned unchanged.
ScoreMap histogram_equalize(const ScoreMap& map, std::size_t bins = 256);

enum class Connectivity { Four = 4, Eight = 8 };

struct ComponentLabeling {
    Grid<std::int32_t> labels;       // 0 = background, 1..n
    std::vector<std::size_t> sizes;  // sizes[i] is the size of label i + 1

    std::size_t count() const { return sizes.size(); }
};

/// Labels are numbered in order of first encounter in a row-major scan.
ComponentLabeling connected_components(const BinaryMask& mask,
                                       Connectivity connectivity = Connectivity::Four);

/// Exact squared Euclidean distance from each true pixel to the nearest false
/// pixel, treating everything outside the image as false. False pixels are 0.
Grid<double> distance_transform_sq(const BinaryMask& mask);

/// Square root of distance_transform_sq.
Grid<double> distance_transform(const BinaryMask& mask);

/// Interior-most pixel of the largest component (ties on size go to the lower
/// label): the distance-transform argmax of that component alone, ties broken
/// by smallest row then column. Throws std::invalid_argument on an empty mask.
Pixel largest_component_center(const BinaryMask& mask,
                               Connectivity connectivity = Connectivity::Four);

/// Corner-aligned bilinear resampling. Output stays within the input's range.
ScoreMap resize_bilinear(const ScoreMap& map, std::size_t out_height, std::size_t out_width);

}  // namespace hsiseg
