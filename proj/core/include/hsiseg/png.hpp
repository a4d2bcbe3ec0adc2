#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hsiseg::png {

/// 8-bit image, row-major, `channels` interleaved bytes per pixel.
struct Image {
    std::size_t width = 0;
    std::size_t height = 0;
    std::size_t channels = 0;  // 1 (gray) or 3 (RGB)
    std::vector<std::uint8_t> pixels;
};

std::string encode(const Image& image);
/// Decodes to gray or RGB depending on the stored format.
Image decode(std::string_view bytes);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

}  // namespace hsiseg::png
