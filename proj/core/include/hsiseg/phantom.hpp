#pragma once

#include <cstdint>
#include <string_view>
#include <utility>

#include "hsiseg/cube.hpp"

namespace hsiseg::phantom {

enum class RegionStyle { Voronoi, Blobs };

std::string_view to_string(RegionStyle style);
RegionStyle parse_region_style(std::string_view text);

struct PhantomSpec {
    std::size_t height = 64;
    std::size_t width = 64;
    std::size_t bands = 32;
    std::size_t n_materials = 3;
    double noise_sigma = 0.01;
    std::uint64_t seed = 0;
    RegionStyle region_style = RegionStyle::Voronoi;
    /// Per-pixel multiplicative brightness drawn from [0.5, 1.5].
    bool brightness_jitter = true;
};

/// Minimum pairwise spectral angle between material base spectra, radians.
inline constexpr double kMinMaterialAngle = 0.15;

/// Ignore index attached to generated label maps. Generated scenes contain
/// no ignored pixels.
inline constexpr std::int32_t kIgnoreIndex = 255;

/// Counter-based generator: each draw is SplitMix64 of the seed mixed with a
/// (stream, index) pair, so values do not depend on generation order.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t bits(std::uint64_t stream, std::uint64_t index) const;
    /// Uniform in [0, 1) with 53 random bits.
    double uniform(std::uint64_t stream, std::uint64_t index) const;
    /// Standard normal via Box-Muller over two consecutive counters.
    double normal(std::uint64_t stream, std::uint64_t index) const;

  private:
    std::uint64_t seed_;
};

struct Phantom {
    HyperCube cube;
    LabelMap labels;
    std::vector<std::vector<double>> materials;  // base spectra
};

/// Throws std::invalid_argument when the spec is inconsistent.
void validate(const PhantomSpec& spec);

/// Deterministic synthetic scene; labels are 0..n_materials-1 and every
/// material owns at least one pixel.
Phantom generate(const PhantomSpec& spec);

}  // namespace hsiseg::phantom
