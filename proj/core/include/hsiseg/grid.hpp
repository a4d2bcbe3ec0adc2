#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hsiseg {

/// Pixel coordinate, row-major.
struct Pixel {
    std::size_t row = 0;
    std::size_t col = 0;

    friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

/// Dense row-major H×W raster.
template <typename T>
class Grid {
  public:
    Grid() = default;
    Grid(std::size_t height, std::size_t width, T fill = T{})
        : height_(height), width_(width), values_(height * width, fill) {}
    Grid(std::size_t height, std::size_t width, std::vector<T> values)
        : height_(height), width_(width), values_(std::move(values)) {
        if (values_.size() != height_ * width_) {
            throw std::invalid_argument("grid: value count " + std::to_string(values_.size()) +
                                        " does not match " + std::to_string(height_) + "x" +
                                        std::to_string(width_));
        }
    }

    std::size_t height() const { return height_; }
    std::size_t width() const { return width_; }
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }

    bool contains(Pixel p) const { return p.row < height_ && p.col < width_; }
    bool same_shape(std::size_t h, std::size_t w) const { return h == height_ && w == width_; }
    template <typename U>
    bool same_shape(const Grid<U>& other) const {
        return same_shape(other.height(), other.width());
    }

    const T& operator()(std::size_t r, std::size_t c) const { return values_[r * width_ + c]; }
    T& operator()(std::size_t r, std::size_t c) { return values_[r * width_ + c]; }
    const T& operator[](Pixel p) const { return (*this)(p.row, p.col); }
    T& operator[](Pixel p) { return (*this)(p.row, p.col); }

    std::span<const T> values() const { return values_; }
    std::span<T> values() { return values_; }

    auto begin() const { return values_.begin(); }
    auto end() const { return values_.end(); }

    bool operator==(const Grid&) const = default;

  private:
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::vector<T> values_;
};

/// Boolean raster stored one byte per pixel (0 or 1).
using BinaryMask = Grid<std::uint8_t>;

/// Per-pixel score in [0,1]. Range and finiteness are checked on construction
/// and the values cannot be mutated afterwards.
class ScoreMap {
  public:
    ScoreMap() = default;
    ScoreMap(std::size_t height, std::size_t width, std::vector<double> scores);
    explicit ScoreMap(Grid<double> scores);

    std::size_t height() const { return grid_.height(); }
    std::size_t width() const { return grid_.width(); }
    std::size_t size() const { return grid_.size(); }
    double operator()(std::size_t r, std::size_t c) const { return grid_(r, c); }
    double operator[](Pixel p) const { return grid_[p]; }
    std::span<const double> values() const { return grid_.values(); }
    const Grid<double>& grid() const { return grid_; }

    template <typename U>
    bool same_shape(const Grid<U>& other) const {
        return grid_.same_shape(other);
    }
    bool same_shape(const ScoreMap& other) const { return grid_.same_shape(other.grid_); }

    bool operator==(const ScoreMap&) const = default;

  private:
    Grid<double> grid_;
};

/// Mask of pixels with score strictly greater than `threshold`.
BinaryMask threshold_scores(const ScoreMap& scores, double threshold);

}  // namespace hsiseg
