#include "hsiseg/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "hsiseg/spectral.hpp"

namespace hsiseg::phantom {
namespace {

// SplitMix64 finalizer.
constexpr std::uint64_t mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

enum Stream : std::uint64_t {
    kMaterials = 1,
    kSites = 2,
    kBrightness = 3,
    kNoise = 4,
};

// Sequential draws from one stream.
class Cursor {
  public:
    Cursor(const CounterRng& rng, std::uint64_t stream) : rng_(rng), stream_(stream) {}
    double uniform() { return rng_.uniform(stream_, next_++); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::size_t below(std::size_t n) {
        return std::min(static_cast<std::size_t>(uniform() * static_cast<double>(n)), n - 1);
    }

  private:
    const CounterRng& rng_;
    std::uint64_t stream_;
    std::uint64_t next_ = 0;
};

std::vector<double> random_spectrum(Cursor& cur, std::size_t bands) {
    const double c = static_cast<double>(bands);
    const std::size_t bumps = 1 + cur.below(3);
    std::vector<double> out(bands, 0.0);
    for (std::size_t k = 0; k < bumps; ++k) {
        const double amplitude = cur.uniform(0.2, 1.0);
        const double centre = cur.uniform(0.0, c - 1.0);
        const double width = std::max(0.5, cur.uniform(c / 16.0, c / 4.0));
        for (std::size_t b = 0; b < bands; ++b) {
            const double d = (static_cast<double>(b) - centre) / width;
            out[b] += amplitude * std::exp(-0.5 * d * d);
        }
    }
    return out;
}

std::vector<std::vector<double>> make_materials(const PhantomSpec& spec, const CounterRng& rng) {
    Cursor cur(rng, kMaterials);
    std::vector<std::vector<double>> out;
    constexpr int kMaxAttempts = 100000;
    for (int attempt = 0; out.size() < spec.n_materials; ++attempt) {
        if (attempt == kMaxAttempts) {
            throw std::invalid_argument("could not find " + std::to_string(spec.n_materials) +
                                        " materials separated by 0.15 rad in " +
                                        std::to_string(spec.bands) + " bands");
        }
        auto candidate = random_spectrum(cur, spec.bands);
        bool separated = std::all_of(out.begin(), out.end(), [&](const auto& m) {
            return spectral_angle(candidate, m) >= kMinMaterialAngle;
        });
        if (separated) out.push_back(std::move(candidate));
    }
    return out;
}

// Draws `count` distinct pixel indices.
std::vector<std::size_t> distinct_pixels(Cursor& cur, std::size_t pixels, std::size_t count) {
    std::vector<std::size_t> out;
    while (out.size() < count) {
        std::size_t p = cur.below(pixels);
        if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    }
    return out;
}

Grid<std::int32_t> voronoi_regions(const PhantomSpec& spec, const CounterRng& rng) {
    Cursor cur(rng, kSites);
    auto sites = distinct_pixels(cur, spec.height * spec.width, spec.n_materials);
    Grid<std::int32_t> out(spec.height, spec.width, 0);
    for (std::size_t r = 0; r < spec.height; ++r) {
        for (std::size_t c = 0; c < spec.width; ++c) {
            std::size_t best = 0;
            long long best_d = -1;
            for (std::size_t i = 0; i < sites.size(); ++i) {
                const auto dr = static_cast<long long>(r) - static_cast<long long>(sites[i] / spec.width);
                const auto dc = static_cast<long long>(c) - static_cast<long long>(sites[i] % spec.width);
                const long long d = dr * dr + dc * dc;
                if (best_d < 0 || d < best_d) {
                    best_d = d;
                    best = i;
                }
            }
            out(r, c) = static_cast<std::int32_t>(best);
        }
    }
    return out;
}

Grid<std::int32_t> blob_regions(const PhantomSpec& spec, const CounterRng& rng) {
    Cursor cur(rng, kSites);
    const std::size_t pixels = spec.height * spec.width;
    // anchors[m] is a pixel material m is guaranteed to own.
    auto anchors = distinct_pixels(cur, pixels, spec.n_materials);
    const double side = static_cast<double>(std::min(spec.height, spec.width));

    Grid<std::int32_t> out(spec.height, spec.width, 0);
    for (std::size_t m = 1; m < spec.n_materials; ++m) {
        const std::size_t blobs = 1 + cur.below(3);
        for (std::size_t k = 0; k < blobs; ++k) {
            const std::size_t centre = k == 0 ? anchors[m] : cur.below(pixels);
            const double cr = static_cast<double>(centre / spec.width);
            const double cc = static_cast<double>(centre % spec.width);
            const double radius = cur.uniform(std::max(1.0, side / 10.0), std::max(1.0, side / 4.0));
            for (std::size_t r = 0; r < spec.height; ++r) {
                for (std::size_t c = 0; c < spec.width; ++c) {
                    const double dr = static_cast<double>(r) - cr;
                    const double dc = static_cast<double>(c) - cc;
                    if (dr * dr + dc * dc <= radius * radius) {
                        out(r, c) = static_cast<std::int32_t>(m);
                    }
                }
            }
        }
    }
    for (std::size_t m = 0; m < spec.n_materials; ++m) {
        out.values()[anchors[m]] = static_cast<std::int32_t>(m);
    }
    return out;
}

}  // namespace

std::uint64_t CounterRng::bits(std::uint64_t stream, std::uint64_t index) const {
    return mix(seed_ ^ mix(stream * 0xD1B54A32D192ED03ULL ^ mix(index)));
}

double CounterRng::uniform(std::uint64_t stream, std::uint64_t index) const {
    return static_cast<double>(bits(stream, index) >> 11) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t stream, std::uint64_t index) const {
    const double u1 = 1.0 - uniform(stream, 2 * index);  // (0, 1]
    const double u2 = uniform(stream, 2 * index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::string_view to_string(RegionStyle style) {
    return style == RegionStyle::Voronoi ? "voronoi" : "blobs";
}

RegionStyle parse_region_style(std::string_view text) {
    if (text == "voronoi") return RegionStyle::Voronoi;
    if (text == "blobs") return RegionStyle::Blobs;
    throw std::invalid_argument("unknown region style '" + std::string(text) +
                                "' (expected voronoi or blobs)");
}

void validate(const PhantomSpec& spec) {
    if (spec.height == 0 || spec.width == 0 || spec.bands == 0) {
        throw std::invalid_argument("phantom dimensions must be positive");
    }
    if (spec.n_materials < 2) throw std::invalid_argument("phantom needs at least 2 materials");
    if (spec.n_materials > spec.height * spec.width) {
        throw std::invalid_argument("more materials than pixels");
    }
    if (spec.n_materials >= static_cast<std::size_t>(kIgnoreIndex)) {
        throw std::invalid_argument("label values must stay below the ignore index 255");
    }
    if (!(spec.noise_sigma >= 0.0) || !std::isfinite(spec.noise_sigma)) {
        throw std::invalid_argument("noise sigma must be finite and non-negative");
    }
}

Phantom generate(const PhantomSpec& spec) {
    validate(spec);
    const CounterRng rng(spec.seed);
    auto materials = make_materials(spec, rng);
    Grid<std::int32_t> labels = spec.region_style == RegionStyle::Voronoi
                                    ? voronoi_regions(spec, rng)
                                    : blob_regions(spec, rng);

    const std::size_t pixels = spec.height * spec.width;
    std::vector<double> data(pixels * spec.bands);
    for (std::size_t i = 0; i < pixels; ++i) {
        const auto& base = materials[static_cast<std::size_t>(labels.values()[i])];
        const double brightness = spec.brightness_jitter ? 0.5 + rng.uniform(kBrightness, i) : 1.0;
        for (std::size_t b = 0; b < spec.bands; ++b) {
            double v = base[b] * brightness;
            if (spec.noise_sigma > 0.0) v += spec.noise_sigma * rng.normal(kNoise, i * spec.bands + b);
            data[i * spec.bands + b] = std::max(0.0, v);
        }
    }

    return Phantom{HyperCube(spec.height, spec.width, spec.bands, std::move(data)),
                   LabelMap(std::move(labels), kIgnoreIndex), std::move(materials)};
}

}  // namespace hsiseg::phantom
