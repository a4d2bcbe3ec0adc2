#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hsiseg/cube.hpp"

namespace hsiseg::envi {

enum class Interleave { Bsq, Bil, Bip };

/// ENVI "data type" codes supported by this reader.
enum class DataType : int {
    UInt8 = 1,
    Int16 = 2,
    Int32 = 3,
    Float32 = 4,
    Float64 = 5,
    UInt16 = 12,
};

enum class ByteOrder : int { Little = 0, Big = 1 };

std::size_t type_size(DataType type);
bool is_integer(DataType type);

std::string_view to_string(Interleave interleave);
Interleave parse_interleave(std::string_view text);

/// Parsed header fields relevant to loading a raster.
struct Header {
    std::size_t samples = 0;  // width
    std::size_t lines = 0;    // height
    std::size_t bands = 0;
    std::size_t header_offset = 0;
    Interleave interleave = Interleave::Bsq;
    DataType data_type = DataType::Float32;
    ByteOrder byte_order = ByteOrder::Little;
    std::vector<double> wavelengths;
};

/// Parses header text. Keys are case-insensitive; `{...}` values may span
/// lines; unknown keys are ignored. Throws FormatError.
Header parse_header(std::string_view text);

std::string format_header(const Header& header);

/// Locates the binary companion of a header: the path with the `.hdr`
/// extension removed, or with `.raw`, `.img`, `.dat` or `.bin` in its place.
std::filesystem::path find_data_file(const std::filesystem::path& header_path);

/// Loads a cube. All sample types widen to double.
HyperCube load_envi(const std::filesystem::path& header_path);

/// Loads a single-band integer raster as class labels.
LabelMap load_labels(const std::filesystem::path& header_path, std::int32_t ignore_index);

struct WriteOptions {
    Interleave interleave = Interleave::Bsq;
    DataType data_type = DataType::Float32;
    ByteOrder byte_order = ByteOrder::Little;
};

/// Writes `<stem>.hdr` and `<stem>.raw`, where `header_path` names the
/// header. Integer types require integral, in-range values; throws
/// std::invalid_argument otherwise. Float32 rounds to nearest.
void write_envi(const std::filesystem::path& header_path, const HyperCube& cube,
                const WriteOptions& options = {});

void write_labels(const std::filesystem::path& header_path, const LabelMap& labels,
                  DataType data_type = DataType::UInt8);

/// Path of the raw file `write_envi` produces for a header path.
std::filesystem::path data_path_for(const std::filesystem::path& header_path);

}  // namespace hsiseg::envi
