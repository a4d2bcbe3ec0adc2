#include "hsiseg/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hsiseg/imgproc.hpp"

namespace hsiseg {

ClickSet::ClickSet(std::initializer_list<Pixel> points) {
    for (auto p : points) add(p);
}

void ClickSet::add(Pixel p) {
    if (contains(p)) {
        throw std::invalid_argument("duplicate click (" + std::to_string(p.row) + "," +
                                    std::to_string(p.col) + ")");
    }
    points_.push_back(p);
}

void ClickSet::pop_back() { points_.pop_back(); }

bool ClickSet::contains(Pixel p) const {
    return std::find(points_.begin(), points_.end(), p) != points_.end();
}

std::string_view to_string(ScfKind kind) {
    switch (kind) {
        case ScfKind::Pcc: return "pcc";
        case ScfKind::SpectralAngle: return "sa";
        case ScfKind::SpectralAngleEqualized: return "sa-eq";
    }
    return "sa";
}

ScfKind parse_scf_kind(std::string_view text) {
    if (text == "pcc") return ScfKind::Pcc;
    if (text == "sa") return ScfKind::SpectralAngle;
    if (text == "sa-eq") return ScfKind::SpectralAngleEqualized;
    throw std::invalid_argument("unknown spectral method '" + std::string(text) +
                                "' (expected pcc, sa or sa-eq)");
}

namespace {

void check_lengths(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("spectrum length mismatch: " + std::to_string(a.size()) +
                                    " vs " + std::to_string(b.size()));
    }
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Angle between unit vectors via 2·atan2(|a-b|, |a+b|). Unlike acos of the
// cosine this stays accurate for nearly parallel spectra.
double angle_between(std::span<const double> a, double norm_a, std::span<const double> b,
                     double norm_b) {
    double diff = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double u = a[i] / norm_a, v = b[i] / norm_b;
        diff += (u - v) * (u - v);
        sum += (u + v) * (u + v);
    }
    return 2.0 * std::atan2(std::sqrt(diff), std::sqrt(sum));
}

// Mean-centred copy and its norm.
struct Centred {
    std::vector<double> dev;
    double norm = 0.0;
};

Centred centre(std::span<const double> x) {
    Centred out;
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    out.dev.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out.dev[i] = x[i] - mean;
    out.norm = std::sqrt(dot(out.dev, out.dev));
    return out;
}

ScoreMap sa_map(const HyperCube& cube, const ClickSet& clicks) {
    struct Ref {
        std::span<const double> values;
        double norm;
    };
    std::vector<Ref> refs;
    for (auto p : clicks) {
        auto s = cube.pixel(p);
        double n = std::sqrt(dot(s, s));
        if (n == 0.0) {
            throw std::invalid_argument("clicked pixel (" + std::to_string(p.row) + "," +
                                        std::to_string(p.col) + ") has an all-zero spectrum");
        }
        refs.push_back({s, n});
    }

    std::vector<double> out(cube.pixel_count(), 0.0);
    for (std::size_t r = 0; r < cube.height(); ++r) {
        for (std::size_t c = 0; c < cube.width(); ++c) {
            auto x = cube.pixel(r, c);
            double nx = std::sqrt(dot(x, x));
            if (nx == 0.0) continue;
            double best = 0.0;
            for (const auto& ref : refs) {
                double score = 1.0 - angle_between(x, nx, ref.values, ref.norm) /
                                         std::numbers::pi;
                best = std::max(best, score);
            }
            out[r * cube.width() + c] = std::clamp(best, 0.0, 1.0);
        }
    }
    return ScoreMap(cube.height(), cube.width(), std::move(out));
}

ScoreMap pcc_map(const HyperCube& cube, const ClickSet& clicks) {
    if (cube.bands() < 2) throw std::invalid_argument("PCC needs at least two bands");
    std::vector<Centred> refs;
    for (auto p : clicks) {
        refs.push_back(centre(cube.pixel(p)));
        if (refs.back().norm == 0.0) {
            throw std::invalid_argument("clicked pixel (" + std::to_string(p.row) + "," +
                                        std::to_string(p.col) + ") has a constant spectrum");
        }
    }

    std::vector<double> out(cube.pixel_count(), 0.5);
    for (std::size_t r = 0; r < cube.height(); ++r) {
        for (std::size_t c = 0; c < cube.width(); ++c) {
            Centred x = centre(cube.pixel(r, c));
            if (x.norm == 0.0) continue;
            double best = 0.0;
            for (const auto& ref : refs) {
                double rho = std::clamp(dot(x.dev, ref.dev) / (x.norm * ref.norm), -1.0, 1.0);
                best = std::max(best, (rho + 1.0) / 2.0);
            }
            out[r * cube.width() + c] = best;
        }
    }
    return ScoreMap(cube.height(), cube.width(), std::move(out));
}

}  // namespace

double spectral_angle(std::span<const double> a, std::span<const double> b) {
    check_lengths(a, b);
    double na = std::sqrt(dot(a, a));
    double nb = std::sqrt(dot(b, b));
    if (na == 0.0 || nb == 0.0) throw std::invalid_argument("spectral angle of a zero vector");
    return angle_between(a, na, b, nb);
}

double pcc(std::span<const double> a, std::span<const double> b) {
    check_lengths(a, b);
    if (a.size() < 2) throw std::invalid_argument("PCC needs at least two bands");
    Centred ca = centre(a);
    Centred cb = centre(b);
    if (ca.norm == 0.0 || cb.norm == 0.0) {
        throw std::invalid_argument("PCC undefined for a constant spectrum");
    }
    return std::clamp(dot(ca.dev, cb.dev) / (ca.norm * cb.norm), -1.0, 1.0);
}

void validate_clicks(const ClickSet& clicks, std::size_t height, std::size_t width) {
    if (clicks.empty()) throw std::invalid_argument("click set is empty");
    for (auto p : clicks) {
        if (p.row >= height || p.col >= width) {
            throw std::out_of_range("click (" + std::to_string(p.row) + "," +
                                    std::to_string(p.col) + ") outside " +
                                    std::to_string(height) + "x" + std::to_string(width) +
                                    " image");
        }
    }
}

ScoreMap scf_map(const HyperCube& cube, const ClickSet& clicks, ScfKind kind,
                 std::size_t equalize_bins) {
    validate_clicks(clicks, cube.height(), cube.width());
    switch (kind) {
        case ScfKind::Pcc: return pcc_map(cube, clicks);
        case ScfKind::SpectralAngle: return sa_map(cube, clicks);
        case ScfKind::SpectralAngleEqualized:
            return histogram_equalize(sa_map(cube, clicks), equalize_bins);
    }
    throw std::invalid_argument("unknown ScfKind");
}

}  // namespace hsiseg
