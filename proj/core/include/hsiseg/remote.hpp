#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "hsiseg/backend.hpp"
#include "hsiseg/wire.hpp"

namespace hsiseg {

/// Client for an external fusion model reachable over HTTP.
///
/// segment() builds the fusion input, POSTs it to `{endpoint}/segment` and
/// validates the reply. Failures raise wire::RemoteError; an out-of-contract
/// score map is never returned. When the RGB resolution differs from the
/// cube's, the reply is resampled back to cube resolution.
class RemoteBackend final : public SegmentationBackend {
  public:
    /// `endpoint` is "http://host:port" optionally followed by a base path.
    /// Throws std::invalid_argument for anything else.
    RemoteBackend(std::string endpoint, std::chrono::milliseconds timeout,
                  std::size_t equalize_bins = 256);

    ScoreMap segment(const HyperCube& cube, const PseudoRgb& rgb,
                     const ClickSet& clicks) const override;
    std::string name() const override { return "remote:" + endpoint_; }

    /// Sends a prepared fusion input and returns the score map at RGB resolution.
    ScoreMap send(const FusionInput& input) const;

  private:
    std::string endpoint_;
    std::string host_;
    std::string base_path_;
    std::chrono::milliseconds timeout_;
    std::size_t bins_;
};

std::unique_ptr<SegmentationBackend> remote_backend(
    const std::string& endpoint, std::chrono::milliseconds timeout = std::chrono::seconds(30));

}  // namespace hsiseg
