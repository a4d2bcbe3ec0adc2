#include "hsiseg/imgproc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace hsiseg {

ScoreMap histogram_equalize(const ScoreMap& map, std::size_t bins) {
    if (bins == 0) throw std::invalid_argument("histogram needs at least one bin");
    auto values = map.values();
    if (values.empty()) return map;
    auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double span = *hi_it - lo;
    if (span <= 0.0) return map;

    auto bin_of = [&](double v) {
        auto b = static_cast<std::size_t>((v - lo) / span * static_cast<double>(bins));
        return std::min(b, bins - 1);
    };

    std::vector<std::size_t> cdf(bins, 0);
    for (double v : values) ++cdf[bin_of(v)];
    std::partial_sum(cdf.begin(), cdf.end(), cdf.begin());

    const std::size_t n = values.size();
    const std::size_t cdf_min = *std::find_if(cdf.begin(), cdf.end(), [](auto c) { return c > 0; });
    if (cdf_min == n) return map;

    std::vector<double> out(n);
    const double denom = static_cast<double>(n - cdf_min);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = static_cast<double>(cdf[bin_of(values[i])] - cdf_min) / denom;
    }
    return ScoreMap(map.height(), map.width(), std::move(out));
}

namespace {

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
    while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    return x;
}

void unite(std::vector<std::size_t>& parent, std::size_t a, std::size_t b) {
    a = find_root(parent, a);
    b = find_root(parent, b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent[a] = b;
}

// 1-D squared distance transform over a sampled function (lower envelope of
// parabolas). `f` holds 0 at sites and +inf elsewhere.
void edt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<std::size_t>& v,
            std::vector<double>& z) {
    const std::size_t n = f.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::size_t k = 0;
    std::size_t first = 0;
    while (first < n && f[first] == inf) ++first;
    if (first == n) {
        std::fill(d.begin(), d.end(), inf);
        return;
    }
    v[0] = first;
    z[0] = -inf;
    z[1] = inf;
    for (std::size_t q = first + 1; q < n; ++q) {
        if (f[q] == inf) continue;
        const double fq = f[q] + static_cast<double>(q * q);
        double s = 0.0;
        while (true) {
            const double vk = static_cast<double>(v[k]);
            s = (fq - (f[v[k]] + vk * vk)) / (2.0 * (static_cast<double>(q) - vk));
            if (s <= z[k] && k > 0) {
                --k;
                continue;
            }
            break;
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = inf;
    }
    k = 0;
    for (std::size_t q = 0; q < n; ++q) {
        while (z[k + 1] < static_cast<double>(q)) ++k;
        const double dq = static_cast<double>(q) - static_cast<double>(v[k]);
        d[q] = dq * dq + f[v[k]];
    }
}

}  // namespace

ComponentLabeling connected_components(const BinaryMask& mask, Connectivity connectivity) {
    const std::size_t h = mask.height(), w = mask.width();
    std::vector<std::size_t> parent(h * w);
    std::iota(parent.begin(), parent.end(), std::size_t{0});

    // First pass: union each foreground pixel with its already-visited neighbours.
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
            if (!mask(r, c)) continue;
            const std::size_t i = r * w + c;
            if (c > 0 && mask(r, c - 1)) unite(parent, i, i - 1);
            if (r > 0 && mask(r - 1, c)) unite(parent, i, i - w);
            if (connectivity == Connectivity::Eight && r > 0) {
                if (c > 0 && mask(r - 1, c - 1)) unite(parent, i, i - w - 1);
                if (c + 1 < w && mask(r - 1, c + 1)) unite(parent, i, i - w + 1);
            }
        }
    }

    // Second pass: relabel roots in first-encounter order.
    ComponentLabeling out{Grid<std::int32_t>(h, w, 0), {}};
    std::vector<std::int32_t> root_label(h * w, 0);
    for (std::size_t i = 0; i < h * w; ++i) {
        if (!mask.values()[i]) continue;
        std::size_t root = find_root(parent, i);
        if (root_label[root] == 0) {
            out.sizes.push_back(0);
            root_label[root] = static_cast<std::int32_t>(out.sizes.size());
        }
        out.labels.values()[i] = root_label[root];
        ++out.sizes[static_cast<std::size_t>(root_label[root]) - 1];
    }
    return out;
}

Grid<double> distance_transform_sq(const BinaryMask& mask) {
    // Pad by one false pixel on every side so the border acts as background.
    const std::size_t h = mask.height() + 2, w = mask.width() + 2;
    constexpr double inf = std::numeric_limits<double>::infinity();
    Grid<double> grid(h, w, 0.0);
    for (std::size_t r = 0; r < mask.height(); ++r) {
        for (std::size_t c = 0; c < mask.width(); ++c) {
            if (mask(r, c)) grid(r + 1, c + 1) = inf;
        }
    }

    const std::size_t n = std::max(h, w);
    std::vector<double> f(n), d(n), z(n + 1);
    std::vector<std::size_t> v(n);

    f.resize(h);
    d.resize(h);
    for (std::size_t c = 0; c < w; ++c) {
        for (std::size_t r = 0; r < h; ++r) f[r] = grid(r, c);
        edt_1d(f, d, v, z);
        for (std::size_t r = 0; r < h; ++r) grid(r, c) = d[r];
    }
    f.resize(w);
    d.resize(w);
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w; ++c) f[c] = grid(r, c);
        edt_1d(f, d, v, z);
        for (std::size_t c = 0; c < w; ++c) grid(r, c) = d[c];
    }

    Grid<double> out(mask.height(), mask.width(), 0.0);
    for (std::size_t r = 0; r < mask.height(); ++r) {
        for (std::size_t c = 0; c < mask.width(); ++c) {
            if (mask(r, c)) out(r, c) = grid(r + 1, c + 1);
        }
    }
    return out;
}

Grid<double> distance_transform(const BinaryMask& mask) {
    Grid<double> out = distance_transform_sq(mask);
    for (double& v : out.values()) v = std::sqrt(v);
    return out;
}

Pixel largest_component_center(const BinaryMask& mask, Connectivity connectivity) {
    ComponentLabeling cc = connected_components(mask, connectivity);
    if (cc.count() == 0) throw std::invalid_argument("mask has no foreground pixels");
    const auto largest = static_cast<std::int32_t>(
        std::max_element(cc.sizes.begin(), cc.sizes.end()) - cc.sizes.begin() + 1);

    BinaryMask component(mask.height(), mask.width());
    for (std::size_t i = 0; i < component.size(); ++i) {
        component.values()[i] = cc.labels.values()[i] == largest ? 1 : 0;
    }
    Grid<double> dist = distance_transform_sq(component);

    Pixel best{};
    double best_d = -1.0;
    for (std::size_t r = 0; r < mask.height(); ++r) {
        for (std::size_t c = 0; c < mask.width(); ++c) {
            if (component(r, c) && dist(r, c) > best_d) {
                best_d = dist(r, c);
                best = {r, c};
            }
        }
    }
    return best;
}

ScoreMap resize_bilinear(const ScoreMap& map, std::size_t out_height, std::size_t out_width) {
    if (out_height == 0 || out_width == 0) {
        throw std::invalid_argument("resize target dimensions must be positive");
    }
    const std::size_t in_h = map.height(), in_w = map.width();
    if (in_h == out_height && in_w == out_width) return map;

    auto values = map.values();
    auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it, hi = *hi_it;

    auto source = [](std::size_t i, std::size_t in, std::size_t out) {
        if (in == 1 || out == 1) return 0.0;
        return static_cast<double>(i) * static_cast<double>(in - 1) / static_cast<double>(out - 1);
    };

    std::vector<double> out(out_height * out_width);
    for (std::size_t r = 0; r < out_height; ++r) {
        const double sr = source(r, in_h, out_height);
        const auto r0 = static_cast<std::size_t>(std::floor(sr));
        const std::size_t r1 = std::min(r0 + 1, in_h - 1);
        const double tr = sr - static_cast<double>(r0);
        for (std::size_t c = 0; c < out_width; ++c) {
            const double sc = source(c, in_w, out_width);
            const auto c0 = static_cast<std::size_t>(std::floor(sc));
            const std::size_t c1 = std::min(c0 + 1, in_w - 1);
            const double tc = sc - static_cast<double>(c0);
            const double top = map(r0, c0) * (1.0 - tc) + map(r0, c1) * tc;
            const double bottom = map(r1, c0) * (1.0 - tc) + map(r1, c1) * tc;
            out[r * out_width + c] = std::clamp(top * (1.0 - tr) + bottom * tr, lo, hi);
        }
    }
    return ScoreMap(out_height, out_width, std::move(out));
}

}  // namespace hsiseg
