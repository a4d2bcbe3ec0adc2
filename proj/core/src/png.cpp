#include "hsiseg/png.hpp"

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <png.h>

#include "hsiseg/error.hpp"

namespace hsiseg::png {

std::string encode(const Image& image) {
    if (image.channels != 1 && image.channels != 3) {
        throw std::invalid_argument("PNG encoder supports 1 or 3 channels");
    }
    if (image.pixels.size() != image.width * image.height * image.channels) {
        throw std::invalid_argument("PNG pixel buffer has the wrong size");
    }
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    img.width = static_cast<png_uint_32>(image.width);
    img.height = static_cast<png_uint_32>(image.height);
    img.format = image.channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;

    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&img, nullptr, &size, 0, image.pixels.data(), 0, nullptr)) {
        throw Error(std::string("PNG encode failed: ") + img.message);
    }
    std::string out(size, '\0');
    if (!png_image_write_to_memory(&img, out.data(), &size, 0, image.pixels.data(), 0, nullptr)) {
        throw Error(std::string("PNG encode failed: ") + img.message);
    }
    out.resize(size);
    return out;
}

Image decode(std::string_view bytes) {
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) {
        throw FormatError(std::string("PNG decode failed: ") + img.message);
    }
    const bool gray = (img.format & PNG_FORMAT_FLAG_COLOR) == 0;
    img.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    Image out;
    out.width = img.width;
    out.height = img.height;
    out.channels = gray ? 1 : 3;
    out.pixels.resize(PNG_IMAGE_SIZE(img));
    if (!png_image_finish_read(&img, nullptr, out.pixels.data(), 0, nullptr)) {
        throw FormatError(std::string("PNG decode failed: ") + img.message);
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("cannot write " + path);
}

}  // namespace hsiseg::png
