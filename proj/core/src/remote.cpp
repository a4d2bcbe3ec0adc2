#include "hsiseg/remote.hpp"

#include <atomic>
#include <regex>

#include <httplib.h>

#include "hsiseg/imgproc.hpp"

namespace hsiseg {
namespace {

std::atomic<std::uint64_t> next_request_id{1};

}  // namespace

RemoteBackend::RemoteBackend(std::string endpoint, std::chrono::milliseconds timeout,
                             std::size_t equalize_bins)
    : endpoint_(std::move(endpoint)), timeout_(timeout), bins_(equalize_bins) {
    static const std::regex pattern(R"(^(http://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(endpoint_, m, pattern)) {
        throw std::invalid_argument("remote endpoint must look like http://host:port[/path], got '" +
                                    endpoint_ + "'");
    }
    host_ = m[1].str();
    base_path_ = m[2].str();
    while (!base_path_.empty() && base_path_.back() == '/') base_path_.pop_back();
}

ScoreMap RemoteBackend::send(const FusionInput& input) const {
    using wire::RemoteError;
    using wire::RemoteErrorKind;

    httplib::Client client(host_);
    const auto secs = static_cast<time_t>(timeout_.count() / 1000);
    const auto usecs = static_cast<time_t>((timeout_.count() % 1000) * 1000);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);

    const std::string request_id = std::to_string(next_request_id.fetch_add(1));
    httplib::Headers headers{{"X-Request-Id", request_id}};

    const auto started = std::chrono::steady_clock::now();
    auto res = client.Post(base_path_ + "/segment", headers, wire::encode_request(input),
                           "application/json");
    if (!res) {
        const auto elapsed = std::chrono::steady_clock::now() - started;
        const auto err = res.error();
        if (err == httplib::Error::ConnectionTimeout ||
            (err == httplib::Error::Read && elapsed >= timeout_)) {
            throw RemoteError(RemoteErrorKind::Timeout,
                              endpoint_ + " did not answer within " +
                                  std::to_string(timeout_.count()) + " ms");
        }
        throw RemoteError(RemoteErrorKind::Transport, endpoint_ + ": " + httplib::to_string(err));
    }
    if (res->status != 200) {
        throw RemoteError(RemoteErrorKind::Status,
                          "HTTP " + std::to_string(res->status) + ": " + res->body);
    }
    if (res->has_header("X-Request-Id") && res->get_header_value("X-Request-Id") != request_id) {
        throw RemoteError(RemoteErrorKind::Malformed, "response correlation id mismatch");
    }
    return wire::decode_response(res->body, input.rgb.height(), input.rgb.width());
}

ScoreMap RemoteBackend::segment(const HyperCube& cube, const PseudoRgb& rgb,
                                const ClickSet& clicks) const {
    ScoreMap scores = send(build_fusion_input(cube, rgb, clicks, bins_));
    if (scores.height() != cube.height() || scores.width() != cube.width()) {
        return resize_bilinear(scores, cube.height(), cube.width());
    }
    return scores;
}

std::unique_ptr<SegmentationBackend> remote_backend(const std::string& endpoint,
                                                    std::chrono::milliseconds timeout) {
    return std::make_unique<RemoteBackend>(endpoint, timeout);
}

}  // namespace hsiseg
