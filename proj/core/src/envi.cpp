#include "hsiseg/envi.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "hsiseg/error.hpp"

namespace hsiseg::envi {
namespace fs = std::filesystem;

namespace {

std::string normalize_key(std::string_view raw) {
    std::string out;
    bool pending_space = false;
    for (char ch : raw) {
        if (std::isspace(static_cast<unsigned char>(ch))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::size_t parse_count(const std::string& key, std::string_view value) {
    value = trim(value);
    std::size_t out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw FormatError("header field '" + key + "' is not a non-negative integer: '" +
                          std::string(value) + "'");
    }
    return out;
}

std::vector<double> parse_list(std::string_view value) {
    value = trim(value);
    if (value.size() < 2 || value.front() != '{' || value.back() != '}') {
        throw FormatError("expected {...} list value");
    }
    value = value.substr(1, value.size() - 2);
    std::vector<double> out;
    while (!value.empty()) {
        auto comma = value.find(',');
        auto item = trim(value.substr(0, comma));
        if (!item.empty()) {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
            if (ec != std::errc{} || ptr != item.data() + item.size()) {
                throw FormatError("bad list element '" + std::string(item) + "'");
            }
            out.push_back(v);
        }
        if (comma == std::string_view::npos) break;
        value.remove_prefix(comma + 1);
    }
    return out;
}

DataType parse_data_type(std::size_t code) {
    switch (code) {
        case 1: return DataType::UInt8;
        case 2: return DataType::Int16;
        case 3: return DataType::Int32;
        case 4: return DataType::Float32;
        case 5: return DataType::Float64;
        case 12: return DataType::UInt16;
        default: throw FormatError("unsupported data type code " + std::to_string(code));
    }
}

std::size_t disk_index(const Header& h, std::size_t r, std::size_t c, std::size_t b) {
    switch (h.interleave) {
        case Interleave::Bsq: return (b * h.lines + r) * h.samples + c;
        case Interleave::Bil: return (r * h.bands + b) * h.samples + c;
        case Interleave::Bip: return (r * h.samples + c) * h.bands + b;
    }
    return 0;
}

template <typename U>
U load_word(const unsigned char* p, bool swap) {
    U u;
    std::memcpy(&u, p, sizeof(U));
    if (swap) {
        U s = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i) {
            s = static_cast<U>((s << 8) | ((u >> (8 * i)) & 0xFF));
        }
        u = s;
    }
    return u;
}

template <typename U>
void store_word(unsigned char* p, U u, bool swap) {
    if (swap) {
        U s = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i) {
            s = static_cast<U>((s << 8) | ((u >> (8 * i)) & 0xFF));
        }
        u = s;
    }
    std::memcpy(p, &u, sizeof(U));
}

bool needs_swap(ByteOrder order) {
    return (order == ByteOrder::Big) != (std::endian::native == std::endian::big);
}

double decode(const unsigned char* p, DataType type, bool swap) {
    switch (type) {
        case DataType::UInt8: return *p;
        case DataType::Int16: return std::bit_cast<std::int16_t>(load_word<std::uint16_t>(p, swap));
        case DataType::UInt16: return load_word<std::uint16_t>(p, swap);
        case DataType::Int32: return std::bit_cast<std::int32_t>(load_word<std::uint32_t>(p, swap));
        case DataType::Float32: return std::bit_cast<float>(load_word<std::uint32_t>(p, swap));
        case DataType::Float64: return std::bit_cast<double>(load_word<std::uint64_t>(p, swap));
    }
    return 0.0;
}

template <typename I>
I checked_integral(double v) {
    if (v != std::floor(v) || v < static_cast<double>(std::numeric_limits<I>::min()) ||
        v > static_cast<double>(std::numeric_limits<I>::max())) {
        throw std::invalid_argument("value " + std::to_string(v) +
                                    " is not representable in the target integer type");
    }
    return static_cast<I>(v);
}

void encode(unsigned char* p, double v, DataType type, bool swap) {
    switch (type) {
        case DataType::UInt8: *p = checked_integral<std::uint8_t>(v); break;
        case DataType::Int16:
            store_word(p, std::bit_cast<std::uint16_t>(checked_integral<std::int16_t>(v)), swap);
            break;
        case DataType::UInt16: store_word(p, checked_integral<std::uint16_t>(v), swap); break;
        case DataType::Int32:
            store_word(p, std::bit_cast<std::uint32_t>(checked_integral<std::int32_t>(v)), swap);
            break;
        case DataType::Float32:
            store_word(p, std::bit_cast<std::uint32_t>(static_cast<float>(v)), swap);
            break;
        case DataType::Float64: store_word(p, std::bit_cast<std::uint64_t>(v), swap); break;
    }
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

struct Raster {
    Header header;
    std::vector<double> values;  // BIP order
};

Raster read_raster(const fs::path& header_path) {
    Raster out;
    out.header = parse_header(read_file(header_path));
    const Header& h = out.header;
    const auto data_path = find_data_file(header_path);
    const std::string bytes = read_file(data_path);

    const std::size_t count = h.samples * h.lines * h.bands;
    const std::size_t tsize = type_size(h.data_type);
    if (bytes.size() != h.header_offset + count * tsize) {
        throw FormatError("binary size mismatch: " + data_path.string() + " has " +
                          std::to_string(bytes.size()) + " bytes, header declares " +
                          std::to_string(h.header_offset + count * tsize));
    }
    const auto* base = reinterpret_cast<const unsigned char*>(bytes.data()) + h.header_offset;
    const bool swap = needs_swap(h.byte_order);

    out.values.resize(count);
    for (std::size_t r = 0; r < h.lines; ++r) {
        for (std::size_t c = 0; c < h.samples; ++c) {
            for (std::size_t b = 0; b < h.bands; ++b) {
                double v = decode(base + disk_index(h, r, c, b) * tsize, h.data_type, swap);
                if (!std::isfinite(v)) {
                    throw FormatError("non-finite sample at line " + std::to_string(r) +
                                      ", sample " + std::to_string(c) + ", band " +
                                      std::to_string(b));
                }
                out.values[(r * h.samples + c) * h.bands + b] = v;
            }
        }
    }
    return out;
}

void write_raster(const fs::path& header_path, const Header& h, std::span<const double> bip) {
    const std::size_t tsize = type_size(h.data_type);
    std::string bytes(bip.size() * tsize, '\0');
    auto* base = reinterpret_cast<unsigned char*>(bytes.data());
    const bool swap = needs_swap(h.byte_order);
    for (std::size_t r = 0; r < h.lines; ++r) {
        for (std::size_t c = 0; c < h.samples; ++c) {
            for (std::size_t b = 0; b < h.bands; ++b) {
                encode(base + disk_index(h, r, c, b) * tsize,
                       bip[(r * h.samples + c) * h.bands + b], h.data_type, swap);
            }
        }
    }

    std::ofstream data(data_path_for(header_path), std::ios::binary | std::ios::trunc);
    data.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    std::ofstream hdr(header_path, std::ios::trunc);
    hdr << format_header(h);
    if (!data || !hdr) throw Error("failed writing " + header_path.string());
}

}  // namespace

std::size_t type_size(DataType type) {
    switch (type) {
        case DataType::UInt8: return 1;
        case DataType::Int16:
        case DataType::UInt16: return 2;
        case DataType::Int32:
        case DataType::Float32: return 4;
        case DataType::Float64: return 8;
    }
    return 0;
}

bool is_integer(DataType type) {
    return type != DataType::Float32 && type != DataType::Float64;
}

std::string_view to_string(Interleave interleave) {
    switch (interleave) {
        case Interleave::Bsq: return "bsq";
        case Interleave::Bil: return "bil";
        case Interleave::Bip: return "bip";
    }
    return "bsq";
}

Interleave parse_interleave(std::string_view text) {
    auto key = normalize_key(text);
    if (key == "bsq") return Interleave::Bsq;
    if (key == "bil") return Interleave::Bil;
    if (key == "bip") return Interleave::Bip;
    throw FormatError("unknown interleave '" + std::string(text) + "'");
}

Header parse_header(std::string_view text) {
    std::map<std::string, std::string> fields;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;  // "ENVI" magic, blank lines
        std::string key = normalize_key(std::string_view(line).substr(0, eq));
        std::string value(trim(std::string_view(line).substr(eq + 1)));
        if (!value.empty() && value.front() == '{') {
            while (value.find('}') == std::string::npos && std::getline(in, line)) {
                value += ' ';
                value += line;
            }
            if (value.find('}') == std::string::npos) {
                throw FormatError("unterminated {...} value for '" + key + "'");
            }
        }
        fields[key] = value;
    }

    auto require = [&](const char* key) -> const std::string& {
        auto it = fields.find(key);
        if (it == fields.end()) {
            throw FormatError(std::string("missing required header field '") + key + "'");
        }
        return it->second;
    };

    Header h;
    h.samples = parse_count("samples", require("samples"));
    h.lines = parse_count("lines", require("lines"));
    h.bands = parse_count("bands", require("bands"));
    h.data_type = parse_data_type(parse_count("data type", require("data type")));
    h.interleave = parse_interleave(require("interleave"));
    if (h.samples == 0 || h.lines == 0 || h.bands == 0) {
        throw FormatError("header dimensions must be positive");
    }
    if (auto it = fields.find("byte order"); it != fields.end()) {
        auto order = parse_count("byte order", it->second);
        if (order > 1) throw FormatError("byte order must be 0 or 1");
        h.byte_order = static_cast<ByteOrder>(order);
    }
    if (auto it = fields.find("header offset"); it != fields.end()) {
        h.header_offset = parse_count("header offset", it->second);
    }
    if (auto it = fields.find("wavelength"); it != fields.end()) {
        h.wavelengths = parse_list(it->second);
        if (h.wavelengths.size() != h.bands) {
            throw FormatError("wavelength list has " + std::to_string(h.wavelengths.size()) +
                              " entries for " + std::to_string(h.bands) + " bands");
        }
    }
    return h;
}

std::string format_header(const Header& h) {
    std::ostringstream out;
    out << "ENVI\n"
        << "samples = " << h.samples << "\n"
        << "lines = " << h.lines << "\n"
        << "bands = " << h.bands << "\n"
        << "header offset = " << h.header_offset << "\n"
        << "file type = ENVI Standard\n"
        << "data type = " << static_cast<int>(h.data_type) << "\n"
        << "interleave = " << to_string(h.interleave) << "\n"
        << "byte order = " << static_cast<int>(h.byte_order) << "\n";
    if (!h.wavelengths.empty()) {
        out << "wavelength units = Nanometers\n"
            << "wavelength = {";
        for (std::size_t i = 0; i < h.wavelengths.size(); ++i) {
            out << (i ? ", " : "") << format_number(h.wavelengths[i]);
        }
        out << "}\n";
    }
    return out.str();
}

fs::path find_data_file(const fs::path& header_path) {
    fs::path stem = header_path;
    if (stem.extension() == ".hdr" || stem.extension() == ".HDR") stem.replace_extension();
    if (fs::is_regular_file(stem)) return stem;
    for (const char* ext : {".raw", ".img", ".dat", ".bin"}) {
        fs::path candidate = stem;
        candidate += ext;
        if (fs::is_regular_file(candidate)) return candidate;
    }
    throw FormatError("no binary data file found for " + header_path.string());
}

fs::path data_path_for(const fs::path& header_path) {
    fs::path out = header_path;
    out.replace_extension(".raw");
    return out;
}

HyperCube load_envi(const fs::path& header_path) {
    Raster raster = read_raster(header_path);
    const Header& h = raster.header;
    return HyperCube(h.lines, h.samples, h.bands, std::move(raster.values), h.wavelengths);
}

LabelMap load_labels(const fs::path& header_path, std::int32_t ignore_index) {
    Raster raster = read_raster(header_path);
    const Header& h = raster.header;
    if (h.bands != 1) {
        throw FormatError("label raster must have 1 band, found " + std::to_string(h.bands));
    }
    if (!is_integer(h.data_type)) throw FormatError("label raster must use an integer data type");
    std::vector<std::int32_t> labels(raster.values.size());
    std::transform(raster.values.begin(), raster.values.end(), labels.begin(),
                   [](double v) { return static_cast<std::int32_t>(v); });
    try {
        return LabelMap(Grid<std::int32_t>(h.lines, h.samples, std::move(labels)), ignore_index);
    } catch (const std::invalid_argument& e) {
        throw FormatError(header_path.string() + ": " + e.what());
    }
}

void write_envi(const fs::path& header_path, const HyperCube& cube, const WriteOptions& options) {
    Header h;
    h.samples = cube.width();
    h.lines = cube.height();
    h.bands = cube.bands();
    h.interleave = options.interleave;
    h.data_type = options.data_type;
    h.byte_order = options.byte_order;
    h.wavelengths = cube.wavelengths();
    write_raster(header_path, h, cube.data());
}

void write_labels(const fs::path& header_path, const LabelMap& labels, DataType data_type) {
    if (!is_integer(data_type)) throw std::invalid_argument("label raster needs an integer type");
    Header h;
    h.samples = labels.width();
    h.lines = labels.height();
    h.bands = 1;
    h.data_type = data_type;
    std::vector<double> values(labels.grid().begin(), labels.grid().end());
    write_raster(header_path, h, values);
}

}  // namespace hsiseg::envi
