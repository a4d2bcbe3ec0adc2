#pragma once

#include <memory>
#include <string>

#include "hsiseg/cube.hpp"
#include "hsiseg/spectral.hpp"

namespace hsiseg {

/// Maps (cube, pseudo-RGB, clicks) to a score map with the cube's dimensions.
/// Implementations must be deterministic and safe to call concurrently.
class SegmentationBackend {
  public:
    virtual ~SegmentationBackend() = default;

    virtual ScoreMap segment(const HyperCube& cube, const PseudoRgb& rgb,
                             const ClickSet& clicks) const = 0;

    /// Identifier used in reports, e.g. "sa" or "remote:http://host:port".
    virtual std::string name() const = 0;
};

/// Spectral-only baseline; ignores the RGB input.
class ScfBackend final : public SegmentationBackend {
  public:
    explicit ScfBackend(ScfKind kind, std::size_t equalize_bins = 256)
        : kind_(kind), bins_(equalize_bins) {}

    ScoreMap segment(const HyperCube& cube, const PseudoRgb& rgb,
                     const ClickSet& clicks) const override;
    std::string name() const override { return std::string(to_string(kind_)); }
    ScfKind kind() const { return kind_; }

  private:
    ScfKind kind_;
    std::size_t bins_;
};

std::unique_ptr<SegmentationBackend> scf_backend(ScfKind kind, std::size_t equalize_bins = 256);

/// Input for a learned fusion model: pseudo-RGB, the equalized spectral-angle
/// map at RGB resolution, and the clicks in RGB coordinates.
struct FusionInput {
    PseudoRgb rgb;
    ScoreMap spectral_prompt;
    ClickSet clicks;
};

/// Maps a click from an in_h×in_w frame to an out_h×out_w frame:
/// round(row·out_h/in_h), clamped to the last row (same for columns).
Pixel rescale_click(Pixel p, std::size_t in_h, std::size_t in_w, std::size_t out_h,
                    std::size_t out_w);

FusionInput build_fusion_input(const HyperCube& cube, const PseudoRgb& rgb,
                               const ClickSet& clicks, std::size_t equalize_bins = 256);

}  // namespace hsiseg
