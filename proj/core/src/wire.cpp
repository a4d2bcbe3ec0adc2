#include "hsiseg/wire.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>

#include <json.hpp>

namespace hsiseg::wire {
namespace {

using nlohmann::json;

constexpr std::string_view kAlphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

constexpr std::array<int, 256> make_reverse() {
    std::array<int, 256> out{};
    for (auto& v : out) v = -1;
    for (std::size_t i = 0; i < kAlphabet.size(); ++i) {
        out[static_cast<unsigned char>(kAlphabet[i])] = static_cast<int>(i);
    }
    return out;
}
constexpr auto kReverse = make_reverse();

std::size_t get_dim(const json& doc, const char* key) {
    if (!doc.contains(key) || !doc[key].is_number_unsigned()) {
        throw std::invalid_argument(std::string("field '") + key +
                                    "' missing or not a non-negative integer");
    }
    return doc[key].get<std::size_t>();
}

std::string get_string(const json& doc, const char* key) {
    if (!doc.contains(key) || !doc[key].is_string()) {
        throw std::invalid_argument(std::string("field '") + key + "' missing or not a string");
    }
    return doc[key].get<std::string>();
}

}  // namespace

std::string base64_encode(std::string_view bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 3 <= bytes.size(); i += 3) {
        const std::uint32_t n = (static_cast<unsigned char>(bytes[i]) << 16) |
                                (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                                static_cast<unsigned char>(bytes[i + 2]);
        out += kAlphabet[(n >> 18) & 63];
        out += kAlphabet[(n >> 12) & 63];
        out += kAlphabet[(n >> 6) & 63];
        out += kAlphabet[n & 63];
    }
    const std::size_t rest = bytes.size() - i;
    if (rest > 0) {
        std::uint32_t n = static_cast<unsigned char>(bytes[i]) << 16;
        if (rest == 2) n |= static_cast<unsigned char>(bytes[i + 1]) << 8;
        out += kAlphabet[(n >> 18) & 63];
        out += kAlphabet[(n >> 12) & 63];
        out += rest == 2 ? kAlphabet[(n >> 6) & 63] : '=';
        out += '=';
    }
    return out;
}

std::string base64_decode(std::string_view text) {
    if (text.size() % 4 != 0) throw std::invalid_argument("base64 length not a multiple of 4");
    std::string out;
    out.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i < text.size(); i += 4) {
        const bool last = i + 4 == text.size();
        int pad = 0;
        std::uint32_t n = 0;
        for (std::size_t j = 0; j < 4; ++j) {
            const char ch = text[i + j];
            if (ch == '=' && last && j >= 2) {
                ++pad;
                n <<= 6;
                continue;
            }
            const int v = kReverse[static_cast<unsigned char>(ch)];
            if (v < 0 || pad > 0) throw std::invalid_argument("invalid base64 input");
            n = (n << 6) | static_cast<std::uint32_t>(v);
        }
        out += static_cast<char>((n >> 16) & 0xFF);
        if (pad < 2) out += static_cast<char>((n >> 8) & 0xFF);
        if (pad < 1) out += static_cast<char>(n & 0xFF);
    }
    return out;
}

std::string encode_f32le(std::span<const double> values) {
    std::string out(values.size() * 4, '\0');
    for (std::size_t i = 0; i < values.size(); ++i) {
        auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(values[i]));
        for (int b = 0; b < 4; ++b) out[i * 4 + b] = static_cast<char>((bits >> (8 * b)) & 0xFF);
    }
    return out;
}

std::vector<double> decode_f32le(std::string_view bytes, std::size_t count) {
    if (bytes.size() != count * 4) {
        throw std::invalid_argument("expected " + std::to_string(count) + " float32 values, got " +
                                    std::to_string(bytes.size()) + " bytes");
    }
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b) {
            bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[i * 4 + b]))
                    << (8 * b);
        }
        out[i] = std::bit_cast<float>(bits);
    }
    return out;
}

std::string_view to_string(RemoteErrorKind kind) {
    switch (kind) {
        case RemoteErrorKind::Transport: return "transport failure";
        case RemoteErrorKind::Timeout: return "timeout";
        case RemoteErrorKind::Status: return "non-success status";
        case RemoteErrorKind::Malformed: return "malformed response";
        case RemoteErrorKind::ShapeMismatch: return "response shape mismatch";
        case RemoteErrorKind::OutOfRange: return "score out of range";
    }
    return "remote error";
}

std::string encode_request(const FusionInput& input) {
    json clicks = json::array();
    for (auto p : input.clicks) clicks.push_back({p.row, p.col});
    json doc = {
        {"height", input.rgb.height()},
        {"width", input.rgb.width()},
        {"clicks", std::move(clicks)},
        {"rgb_b64", base64_encode(encode_f32le(input.rgb.data()))},
        {"prompt_b64", base64_encode(encode_f32le(input.spectral_prompt.values()))},
    };
    return doc.dump();
}

SegmentRequest decode_request(std::string_view body) {
    json doc = json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw std::invalid_argument("request is not JSON");
    SegmentRequest out;
    out.height = get_dim(doc, "height");
    out.width = get_dim(doc, "width");
    if (!doc.contains("clicks") || !doc["clicks"].is_array()) {
        throw std::invalid_argument("field 'clicks' missing or not an array");
    }
    for (const auto& c : doc["clicks"]) {
        if (!c.is_array() || c.size() != 2 || !c[0].is_number_unsigned() ||
            !c[1].is_number_unsigned()) {
            throw std::invalid_argument("click must be [row, col] with non-negative integers");
        }
        out.clicks.push_back({c[0].get<std::size_t>(), c[1].get<std::size_t>()});
    }
    const std::size_t n = out.height * out.width;
    out.rgb = decode_f32le(base64_decode(get_string(doc, "rgb_b64")), n * 3);
    out.prompt = decode_f32le(base64_decode(get_string(doc, "prompt_b64")), n);
    return out;
}

std::string encode_response(std::size_t height, std::size_t width,
                            std::span<const double> scores) {
    json doc = {{"height", height},
                {"width", width},
                {"scores_b64", base64_encode(encode_f32le(scores))}};
    return doc.dump();
}

ScoreMap decode_response(std::string_view body, std::size_t height, std::size_t width) {
    json doc = json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw RemoteError(RemoteErrorKind::Malformed, "response body is not a JSON object");
    }
    std::size_t h = 0, w = 0;
    std::string b64;
    try {
        h = get_dim(doc, "height");
        w = get_dim(doc, "width");
        b64 = get_string(doc, "scores_b64");
    } catch (const std::invalid_argument& e) {
        throw RemoteError(RemoteErrorKind::Malformed, e.what());
    }
    if (h != height || w != width) {
        throw RemoteError(RemoteErrorKind::ShapeMismatch,
                          "expected " + std::to_string(height) + "x" + std::to_string(width) +
                              ", got " + std::to_string(h) + "x" + std::to_string(w));
    }
    std::vector<double> scores;
    try {
        scores = decode_f32le(base64_decode(b64), h * w);
    } catch (const std::invalid_argument& e) {
        throw RemoteError(RemoteErrorKind::Malformed, e.what());
    }
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!std::isfinite(scores[i]) || scores[i] < 0.0 || scores[i] > 1.0) {
            throw RemoteError(RemoteErrorKind::OutOfRange,
                              "value " + std::to_string(scores[i]) + " at index " +
                                  std::to_string(i));
        }
    }
    return ScoreMap(h, w, std::move(scores));
}

std::string error_body(std::string_view message) {
    return json{{"error", std::string(message)}}.dump();
}

}  // namespace hsiseg::wire
