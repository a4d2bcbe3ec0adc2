#include "hsiseg/backend.hpp"

#include <algorithm>
#include <cmath>

#include "hsiseg/imgproc.hpp"

namespace hsiseg {

ScoreMap ScfBackend::segment(const HyperCube& cube, const PseudoRgb& /*rgb*/,
                             const ClickSet& clicks) const {
    return scf_map(cube, clicks, kind_, bins_);
}

std::unique_ptr<SegmentationBackend> scf_backend(ScfKind kind, std::size_t equalize_bins) {
    return std::make_unique<ScfBackend>(kind, equalize_bins);
}

Pixel rescale_click(Pixel p, std::size_t in_h, std::size_t in_w, std::size_t out_h,
                    std::size_t out_w) {
    auto scale = [](std::size_t v, std::size_t in, std::size_t out) {
        if (in == out) return v;
        const auto scaled = static_cast<std::size_t>(
            std::floor(static_cast<double>(v) * static_cast<double>(out) /
                           static_cast<double>(in) +
                       0.5));
        return std::min(scaled, out - 1);
    };
    return {scale(p.row, in_h, out_h), scale(p.col, in_w, out_w)};
}

FusionInput build_fusion_input(const HyperCube& cube, const PseudoRgb& rgb,
                               const ClickSet& clicks, std::size_t equalize_bins) {
    ScoreMap prompt = resize_bilinear(
        histogram_equalize(scf_map(cube, clicks, ScfKind::SpectralAngle), equalize_bins),
        rgb.height(), rgb.width());

    // Downsampling can merge distinct clicks; keep the first occurrence.
    ClickSet scaled;
    for (auto p : clicks) {
        Pixel q = rescale_click(p, cube.height(), cube.width(), rgb.height(), rgb.width());
        if (!scaled.contains(q)) scaled.add(q);
    }
    return {rgb, std::move(prompt), std::move(scaled)};
}

}  // namespace hsiseg
