#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "hsiseg/grid.hpp"

namespace hsiseg {

/// H×W×C reflectance volume. Stored band-interleaved-by-pixel, i.e. the
/// spectrum of pixel (r, c) is the contiguous range starting at (r*W + c)*C.
class HyperCube {
  public:
    /// Throws std::invalid_argument on zero dimensions, a size mismatch,
    /// non-finite values, or a wavelength list whose length is not `bands`.
    HyperCube(std::size_t height, std::size_t width, std::size_t bands, std::vector<double> data,
              std::vector<double> wavelengths = {});

    std::size_t height() const { return height_; }
    std::size_t width() const { return width_; }
    std::size_t bands() const { return bands_; }
    std::size_t pixel_count() const { return height_ * width_; }

    bool contains(Pixel p) const { return p.row < height_ && p.col < width_; }

    double at(std::size_t r, std::size_t c, std::size_t b) const {
        return data_[(r * width_ + c) * bands_ + b];
    }

    /// Unchecked view of one pixel's spectrum.
    std::span<const double> pixel(std::size_t r, std::size_t c) const {
        return {data_.data() + (r * width_ + c) * bands_, bands_};
    }
    std::span<const double> pixel(Pixel p) const { return pixel(p.row, p.col); }

    std::span<const double> data() const { return data_; }
    const std::vector<double>& wavelengths() const { return wavelengths_; }
    bool has_wavelengths() const { return !wavelengths_.empty(); }

    bool operator==(const HyperCube&) const = default;

  private:
    std::size_t height_;
    std::size_t width_;
    std::size_t bands_;
    std::vector<double> data_;
    std::vector<double> wavelengths_;
};

/// One pixel's spectrum, detached from its cube.
struct Spectrum {
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    operator std::span<const double>() const { return values; }
};

/// Copy of the spectrum at (row, col). Throws std::out_of_range outside the cube.
Spectrum spectrum_at(const HyperCube& cube, std::size_t row, std::size_t col);

/// H×W class map with a sentinel for unlabeled pixels.
class LabelMap {
  public:
    LabelMap(Grid<std::int32_t> labels, std::int32_t ignore_index);

    std::size_t height() const { return labels_.height(); }
    std::size_t width() const { return labels_.width(); }
    std::int32_t ignore_index() const { return ignore_index_; }
    std::int32_t operator()(std::size_t r, std::size_t c) const { return labels_(r, c); }
    const Grid<std::int32_t>& grid() const { return labels_; }

    /// Sorted distinct labels excluding the ignore index.
    std::set<std::int32_t> valid_classes() const;

    /// F = [Y == cls].
    BinaryMask class_mask(std::int32_t cls) const;
    /// Pixels whose label differs from the ignore index.
    BinaryMask valid_mask() const;

  private:
    Grid<std::int32_t> labels_;
    std::int32_t ignore_index_;
};

/// Throws std::invalid_argument when the label map and cube differ in size.
void validate_pair(const HyperCube& cube, const LabelMap& labels);

/// Three channels in [0,1], row-major (r, c, channel).
class PseudoRgb {
  public:
    PseudoRgb(std::size_t height, std::size_t width, std::vector<double> data);

    std::size_t height() const { return height_; }
    std::size_t width() const { return width_; }
    double at(std::size_t r, std::size_t c, std::size_t ch) const {
        return data_[(r * width_ + c) * 3 + ch];
    }
    std::span<const double> data() const { return data_; }

    bool operator==(const PseudoRgb&) const = default;

  private:
    std::size_t height_;
    std::size_t width_;
    std::vector<double> data_;
};

struct BandTriple {
    std::size_t r = 0;
    std::size_t g = 0;
    std::size_t b = 0;
};

/// Default band choice when the user gives none: last, middle and first band
/// as red, green and blue.
BandTriple default_bands(std::size_t band_count);

enum class RgbNormalization { None, PerBandMinMax, GlobalMinMax };

/// Projects three bands of the cube onto [0,1]. A constant band under a
/// min-max mode maps to 0. `None` requires the selected bands to already lie
/// in [0,1].
PseudoRgb pseudo_rgb(const HyperCube& cube, BandTriple bands,
                     RgbNormalization normalize = RgbNormalization::PerBandMinMax);

}  // namespace hsiseg
