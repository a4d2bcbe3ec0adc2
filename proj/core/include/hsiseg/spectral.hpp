#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hsiseg/cube.hpp"
#include "hsiseg/grid.hpp"

namespace hsiseg {

/// Ordered, duplicate-free click history.
class ClickSet {
  public:
    ClickSet() = default;
    ClickSet(std::initializer_list<Pixel> points);

    /// Throws std::invalid_argument when `p` was already clicked.
    void add(Pixel p);
    void pop_back();
    bool contains(Pixel p) const;

    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }
    const Pixel& back() const { return points_.back(); }
    const Pixel& operator[](std::size_t i) const { return points_[i]; }
    auto begin() const { return points_.begin(); }
    auto end() const { return points_.end(); }
    const std::vector<Pixel>& points() const { return points_; }

    bool operator==(const ClickSet&) const = default;

  private:
    std::vector<Pixel> points_;
};

enum class ScfKind { Pcc, SpectralAngle, SpectralAngleEqualized };

std::string_view to_string(ScfKind kind);
/// Accepts "pcc", "sa" and "sa-eq".
ScfKind parse_scf_kind(std::string_view text);

/// Angle between two spectra in radians, in [0, pi]. The cosine is clamped to
/// [-1, 1] before arccos. Throws std::invalid_argument on a length mismatch or
/// a zero-norm input.
double spectral_angle(std::span<const double> a, std::span<const double> b);

/// Pearson correlation of two spectra, clamped to [-1, 1]. Throws
/// std::invalid_argument on a length mismatch, fewer than two bands, or a
/// constant input.
double pcc(std::span<const double> a, std::span<const double> b);

/// Click-conditioned similarity map.
///
/// SA: per-click 1 - angle/pi. PCC: per-click (rho + 1) / 2. Both reduce by a
/// pixel-wise max over clicks. SA_EQUALIZED equalizes the reduced SA map.
///
/// Image pixels with an all-zero spectrum score 0 under SA; constant image
/// pixels score 0.5 under PCC. Clicked pixels with such spectra are errors.
ScoreMap scf_map(const HyperCube& cube, const ClickSet& clicks, ScfKind kind,
                 std::size_t equalize_bins = 256);

/// Throws std::invalid_argument on an empty click set and std::out_of_range on
/// a click outside the image.
void validate_clicks(const ClickSet& clicks, std::size_t height, std::size_t width);

}  // namespace hsiseg
