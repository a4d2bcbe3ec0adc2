#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hsiseg/backend.hpp"
#include "hsiseg/error.hpp"

/// JSON wire format shared by the remote backend client and the HTTP service.
///
/// Request to `{endpoint}/segment`:
///   {"height", "width", "clicks": [[row, col], ...],
///    "rgb_b64": raw f32le H·W·3, "prompt_b64": raw f32le H·W}
/// Response:
///   {"height", "width", "scores_b64": raw f32le H·W}   (status 200)
///   {"error": "..."}                                     (non-200)
namespace hsiseg::wire {

std::string base64_encode(std::string_view bytes);
/// Throws std::invalid_argument on characters outside the standard alphabet or
/// bad padding.
std::string base64_decode(std::string_view text);

/// Little-endian float32 encoding of each value.
std::string encode_f32le(std::span<const double> values);
/// Throws std::invalid_argument unless `bytes` holds exactly `count` floats.
std::vector<double> decode_f32le(std::string_view bytes, std::size_t count);

enum class RemoteErrorKind { Transport, Timeout, Status, Malformed, ShapeMismatch, OutOfRange };

std::string_view to_string(RemoteErrorKind kind);

class RemoteError : public Error {
  public:
    RemoteError(RemoteErrorKind kind, const std::string& message)
        : Error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}
    RemoteErrorKind kind() const { return kind_; }

  private:
    RemoteErrorKind kind_;
};

/// Decoded form of a segment request.
struct SegmentRequest {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<Pixel> clicks;
    std::vector<double> rgb;     // H·W·3
    std::vector<double> prompt;  // H·W
};

std::string encode_request(const FusionInput& input);
/// Throws std::invalid_argument on malformed JSON or inconsistent sizes.
SegmentRequest decode_request(std::string_view body);

std::string encode_response(std::size_t height, std::size_t width,
                            std::span<const double> scores);
/// Validates a response body against the requested dimensions. Throws
/// RemoteError (Malformed, ShapeMismatch or OutOfRange).
ScoreMap decode_response(std::string_view body, std::size_t height, std::size_t width);

std::string error_body(std::string_view message);

}  // namespace hsiseg::wire
