#include "hsiseg/cube.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hsiseg {

HyperCube::HyperCube(std::size_t height, std::size_t width, std::size_t bands,
                     std::vector<double> data, std::vector<double> wavelengths)
    : height_(height),
      width_(width),
      bands_(bands),
      data_(std::move(data)),
      wavelengths_(std::move(wavelengths)) {
    if (height_ == 0 || width_ == 0 || bands_ == 0) {
        throw std::invalid_argument("cube dimensions must be positive");
    }
    if (data_.size() != height_ * width_ * bands_) {
        throw std::invalid_argument("cube data length " + std::to_string(data_.size()) +
                                    " does not match " + std::to_string(height_) + "x" +
                                    std::to_string(width_) + "x" + std::to_string(bands_));
    }
    if (!std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); })) {
        throw std::invalid_argument("cube contains non-finite values");
    }
    if (!wavelengths_.empty() && wavelengths_.size() != bands_) {
        throw std::invalid_argument("wavelength count does not match band count");
    }
}

Spectrum spectrum_at(const HyperCube& cube, std::size_t row, std::size_t col) {
    if (row >= cube.height() || col >= cube.width()) {
        throw std::out_of_range("pixel (" + std::to_string(row) + "," + std::to_string(col) +
                                ") outside " + std::to_string(cube.height()) + "x" +
                                std::to_string(cube.width()) + " cube");
    }
    auto px = cube.pixel(row, col);
    return Spectrum{{px.begin(), px.end()}};
}

LabelMap::LabelMap(Grid<std::int32_t> labels, std::int32_t ignore_index)
    : labels_(std::move(labels)), ignore_index_(ignore_index) {
    if (labels_.empty()) throw std::invalid_argument("label map must not be empty");
    for (auto v : labels_) {
        if (v < 0) throw std::invalid_argument("label values must be non-negative");
    }
}

std::set<std::int32_t> LabelMap::valid_classes() const {
    std::set<std::int32_t> out;
    for (auto v : labels_) {
        if (v != ignore_index_) out.insert(v);
    }
    return out;
}

BinaryMask LabelMap::class_mask(std::int32_t cls) const {
    BinaryMask out(height(), width());
    auto src = labels_.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] == cls ? 1 : 0;
    return out;
}

BinaryMask LabelMap::valid_mask() const {
    BinaryMask out(height(), width());
    auto src = labels_.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] != ignore_index_ ? 1 : 0;
    return out;
}

void validate_pair(const HyperCube& cube, const LabelMap& labels) {
    if (cube.height() != labels.height() || cube.width() != labels.width()) {
        throw std::invalid_argument(
            "label map " + std::to_string(labels.height()) + "x" + std::to_string(labels.width()) +
            " does not match cube " + std::to_string(cube.height()) + "x" +
            std::to_string(cube.width()));
    }
}

PseudoRgb::PseudoRgb(std::size_t height, std::size_t width, std::vector<double> data)
    : height_(height), width_(width), data_(std::move(data)) {
    if (height_ == 0 || width_ == 0) throw std::invalid_argument("rgb dimensions must be positive");
    if (data_.size() != height_ * width_ * 3) {
        throw std::invalid_argument("rgb data length does not match dimensions");
    }
    for (double v : data_) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
            throw std::invalid_argument("rgb value out of [0,1]");
        }
    }
}

BandTriple default_bands(std::size_t band_count) {
    if (band_count == 0) throw std::invalid_argument("band count must be positive");
    return {band_count - 1, band_count / 2, 0};
}

PseudoRgb pseudo_rgb(const HyperCube& cube, BandTriple bands, RgbNormalization normalize) {
    const std::array<std::size_t, 3> sel{bands.r, bands.g, bands.b};
    for (auto b : sel) {
        if (b >= cube.bands()) {
            throw std::out_of_range("band index " + std::to_string(b) + " out of range for " +
                                    std::to_string(cube.bands()) + "-band cube");
        }
    }

    const std::size_t n = cube.pixel_count();
    std::array<double, 3> lo{}, hi{};
    for (std::size_t ch = 0; ch < 3; ++ch) {
        lo[ch] = hi[ch] = cube.data()[sel[ch]];
        for (std::size_t i = 0; i < n; ++i) {
            double v = cube.data()[i * cube.bands() + sel[ch]];
            lo[ch] = std::min(lo[ch], v);
            hi[ch] = std::max(hi[ch], v);
        }
    }
    if (normalize == RgbNormalization::GlobalMinMax) {
        double g_lo = std::min({lo[0], lo[1], lo[2]});
        double g_hi = std::max({hi[0], hi[1], hi[2]});
        lo.fill(g_lo);
        hi.fill(g_hi);
    } else if (normalize == RgbNormalization::None) {
        for (std::size_t ch = 0; ch < 3; ++ch) {
            if (lo[ch] < 0.0 || hi[ch] > 1.0) {
                throw std::invalid_argument("band " + std::to_string(sel[ch]) +
                                            " has values outside [0,1]; choose a normalization");
            }
        }
    }

    std::vector<double> out(n * 3);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t ch = 0; ch < 3; ++ch) {
            double v = cube.data()[i * cube.bands() + sel[ch]];
            if (normalize != RgbNormalization::None) {
                double span = hi[ch] - lo[ch];
                v = span > 0.0 ? std::clamp((v - lo[ch]) / span, 0.0, 1.0) : 0.0;
            }
            out[i * 3 + ch] = v;
        }
    }
    return PseudoRgb(cube.height(), cube.width(), std::move(out));
}

}  // namespace hsiseg
