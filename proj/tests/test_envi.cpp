#include <bit>
#include <cmath>
#include <cstring>

#include <gtest/gtest.h>

#include "hsiseg/envi.hpp"
#include "hsiseg/error.hpp"
#include "support/oracles.hpp"
#include "support/random.hpp"
#include "support/temp_dir.hpp"

using namespace hsiseg;
using hsiseg::testing::TempDir;
using hsiseg::testing::write_text;

namespace {

const char* kU8Header =
    "ENVI\n"
    "samples = 2\n"
    "lines = 2\n"
    "bands = 2\n"
    "interleave = bsq\n"
    "data type = 1\n"
    "byte order = 0\n";

std::string bytes_of(std::initializer_list<int> values) {
    std::string out;
    for (int v : values) out.push_back(static_cast<char>(v));
    return out;
}

}  // namespace

TEST(EnviLoad, BsqByteLayout) {
    TempDir dir;
    write_text(dir / "a.hdr", kU8Header);
    write_text(dir / "a.raw", bytes_of({1, 2, 3, 4, 5, 6, 7, 8}));
    HyperCube cube = envi::load_envi(dir / "a.hdr");
    ASSERT_EQ(cube.height(), 2u);
    ASSERT_EQ(cube.width(), 2u);
    ASSERT_EQ(cube.bands(), 2u);
    EXPECT_EQ(cube.at(0, 0, 0), 1);
    EXPECT_EQ(cube.at(0, 1, 0), 2);
    EXPECT_EQ(cube.at(1, 0, 0), 3);
    EXPECT_EQ(cube.at(1, 1, 0), 4);
    EXPECT_EQ(cube.at(0, 0, 1), 5);
    EXPECT_EQ(cube.at(1, 1, 1), 8);
    EXPECT_EQ(spectrum_at(cube, 0, 1).values, (std::vector<double>{2, 6}));
}

TEST(EnviLoad, BigEndianInt16BipMatchesBsq) {
    TempDir dir;
    write_text(dir / "a.hdr", kU8Header);
    write_text(dir / "a.raw", bytes_of({1, 2, 3, 4, 5, 6, 7, 8}));
    write_text(dir / "b.hdr",
               "ENVI\nsamples = 2\nlines = 2\nbands = 2\ninterleave = bip\ndata type = 2\n"
               "byte order = 1\n");
    // Pixel-interleaved spectra (1,5) (2,6) (3,7) (4,8), two bytes each, MSB first.
    write_text(dir / "b.img", bytes_of({0, 1, 0, 5, 0, 2, 0, 6, 0, 3, 0, 7, 0, 4, 0, 8}));
    EXPECT_EQ(envi::load_envi(dir / "b.hdr"), envi::load_envi(dir / "a.hdr"));
}

TEST(EnviLoad, MissingBandsField) {
    TempDir dir;
    write_text(dir / "a.hdr", "ENVI\nsamples = 2\nlines = 2\ninterleave = bsq\ndata type = 1\n");
    write_text(dir / "a.raw", bytes_of({1, 2, 3, 4}));
    try {
        envi::load_envi(dir / "a.hdr");
        FAIL() << "expected FormatError";
    } catch (const FormatError& e) {
        EXPECT_NE(std::string(e.what()).find("missing required header field"), std::string::npos);
    }
}

TEST(EnviLoad, SizeMismatch) {
    TempDir dir;
    write_text(dir / "a.hdr", kU8Header);
    write_text(dir / "a.raw", bytes_of({1, 2, 3}));
    EXPECT_THROW(envi::load_envi(dir / "a.hdr"), FormatError);
}

TEST(EnviLoad, MissingDataFile) {
    TempDir dir;
    write_text(dir / "a.hdr", kU8Header);
    EXPECT_THROW(envi::load_envi(dir / "a.hdr"), Error);
}

TEST(EnviLoad, RejectsNonFiniteFloats) {
    TempDir dir;
    write_text(dir / "a.hdr", "ENVI\nsamples = 1\nlines = 1\nbands = 1\ninterleave = bsq\ndata type = 4\n");
    const float nan = std::nanf("");
    std::string raw(4, '\0');
    std::memcpy(raw.data(), &nan, 4);
    write_text(dir / "a.raw", raw);
    EXPECT_THROW(envi::load_envi(dir / "a.hdr"), FormatError);
}

TEST(EnviLoad, HeaderOffsetIsSkipped) {
    TempDir dir;
    write_text(dir / "a.hdr", std::string(kU8Header) + "header offset = 3\n");
    write_text(dir / "a.raw", bytes_of({9, 9, 9, 1, 2, 3, 4, 5, 6, 7, 8}));
    EXPECT_EQ(envi::load_envi(dir / "a.hdr").at(1, 1, 1), 8);
}

TEST(EnviHeader, TolerantParsing) {
    envi::Header h = envi::parse_header(
        "ENVI\n"
        "description = {a free-form\n  description, with commas}\n"
        "Samples   =  3\n"
        "LINES=2\n"
        "bands = 3\n"
        "Data Type = 12\n"
        "INTERLEAVE = BIL\n"
        "wavelength = {\n  450.5, 550,\n  650 }\n"
        "sensor type = Unknown\n");
    EXPECT_EQ(h.samples, 3u);
    EXPECT_EQ(h.lines, 2u);
    EXPECT_EQ(h.bands, 3u);
    EXPECT_EQ(h.data_type, envi::DataType::UInt16);
    EXPECT_EQ(h.interleave, envi::Interleave::Bil);
    EXPECT_EQ(h.byte_order, envi::ByteOrder::Little);
    EXPECT_EQ(h.wavelengths, (std::vector<double>{450.5, 550, 650}));
}

TEST(EnviHeader, RejectsBadValues) {
    const std::string base = "ENVI\nsamples = 1\nlines = 1\nbands = 1\n";
    EXPECT_THROW(envi::parse_header(base + "interleave = bsq\ndata type = 6\n"), FormatError);
    EXPECT_THROW(envi::parse_header(base + "interleave = xyz\ndata type = 4\n"), FormatError);
    EXPECT_THROW(envi::parse_header(base + "interleave = bsq\ndata type = 4\nbyte order = 2\n"),
                 FormatError);
    EXPECT_THROW(envi::parse_header("ENVI\nsamples = -1\nlines = 1\nbands = 1\ninterleave = bsq\n"
                                    "data type = 4\n"),
                 FormatError);
}

TEST(EnviHeader, FormatRoundTrip) {
    envi::Header h;
    h.samples = 4;
    h.lines = 5;
    h.bands = 3;
    h.interleave = envi::Interleave::Bip;
    h.data_type = envi::DataType::Int32;
    h.byte_order = envi::ByteOrder::Big;
    h.wavelengths = {400.25, 500, 600.125};
    envi::Header back = envi::parse_header(envi::format_header(h));
    EXPECT_EQ(back.samples, h.samples);
    EXPECT_EQ(back.lines, h.lines);
    EXPECT_EQ(back.bands, h.bands);
    EXPECT_EQ(back.interleave, h.interleave);
    EXPECT_EQ(back.data_type, h.data_type);
    EXPECT_EQ(back.byte_order, h.byte_order);
    EXPECT_EQ(back.wavelengths, h.wavelengths);
}

TEST(EnviWrite, WavelengthsSurviveRoundTrip) {
    TempDir dir;
    HyperCube cube(1, 2, 2, {1, 2, 3, 4}, {410.5, 520.25});
    envi::write_envi(dir / "w.hdr", cube);
    EXPECT_EQ(envi::load_envi(dir / "w.hdr"), cube);
    EXPECT_TRUE(std::filesystem::exists(envi::data_path_for(dir / "w.hdr")));
}

TEST(EnviWrite, IntegerTypesRejectUnrepresentableValues) {
    TempDir dir;
    HyperCube frac(1, 1, 1, {1.5});
    EXPECT_THROW(envi::write_envi(dir / "f.hdr", frac, {.data_type = envi::DataType::Int16}),
                 std::invalid_argument);
    HyperCube big(1, 1, 1, {256});
    EXPECT_THROW(envi::write_envi(dir / "b.hdr", big, {.data_type = envi::DataType::UInt8}),
                 std::invalid_argument);
}

TEST(EnviLabels, LoadsSingleBandIntegerRaster) {
    TempDir dir;
    write_text(dir / "l.hdr", "ENVI\nsamples = 2\nlines = 2\nbands = 1\ninterleave = bsq\ndata type = 1\n");
    write_text(dir / "l.raw", bytes_of({0, 1, 1, 255}));
    LabelMap labels = envi::load_labels(dir / "l.hdr", 255);
    EXPECT_EQ(labels.valid_classes(), (std::set<std::int32_t>{0, 1}));
}

TEST(EnviLabels, RejectsMultiBandAndFloatRasters) {
    TempDir dir;
    write_text(dir / "l.hdr", "ENVI\nsamples = 1\nlines = 1\nbands = 3\ninterleave = bsq\ndata type = 1\n");
    write_text(dir / "l.raw", bytes_of({0, 1, 2}));
    EXPECT_THROW(envi::load_labels(dir / "l.hdr", 255), FormatError);
    write_text(dir / "f.hdr", "ENVI\nsamples = 1\nlines = 1\nbands = 1\ninterleave = bsq\ndata type = 4\n");
    write_text(dir / "f.raw", std::string(4, '\0'));
    EXPECT_THROW(envi::load_labels(dir / "f.hdr", 255), FormatError);
}

TEST(EnviLabels, WriteThenLoad) {
    TempDir dir;
    LabelMap labels(Grid<std::int32_t>(2, 3, std::vector<std::int32_t>{0, 1, 2, 255, 1, 0}), 255);
    envi::write_labels(dir / "l.hdr", labels);
    LabelMap back = envi::load_labels(dir / "l.hdr", 255);
    EXPECT_EQ(back.grid(), labels.grid());
}

class EnviRoundTrip
    : public ::testing::TestWithParam<std::tuple<envi::DataType, envi::Interleave, envi::ByteOrder>> {};

TEST_P(EnviRoundTrip, BitExact) {
    auto [type, interleave, order] = GetParam();
    hsiseg::testing::Rng rng(static_cast<std::uint64_t>(type) * 31 + static_cast<std::uint64_t>(interleave) * 7 +
                     static_cast<std::uint64_t>(order));
    HyperCube cube = hsiseg::testing::representable_cube(type, rng);
    TempDir dir;
    envi::write_envi(dir / "c.hdr", cube, {interleave, type, order});
    HyperCube back = envi::load_envi(dir / "c.hdr");
    ASSERT_EQ(back.data().size(), cube.data().size());
    for (std::size_t i = 0; i < cube.data().size(); ++i) {
        EXPECT_EQ(std::bit_cast<std::uint64_t>(back.data()[i]), std::bit_cast<std::uint64_t>(cube.data()[i]))
            << "index " << i;
    }
    // Writing the reloaded cube reproduces the same bytes.
    envi::write_envi(dir / "d.hdr", back, {interleave, type, order});
    EXPECT_EQ(hsiseg::testing::read_bytes(envi::data_path_for(dir / "c.hdr")),
              hsiseg::testing::read_bytes(envi::data_path_for(dir / "d.hdr")));
}

INSTANTIATE_TEST_SUITE_P(
    AllLayouts, EnviRoundTrip,
    ::testing::Combine(::testing::Values(envi::DataType::UInt8, envi::DataType::Int16,
                                         envi::DataType::Int32, envi::DataType::Float32,
                                         envi::DataType::Float64, envi::DataType::UInt16),
                       ::testing::Values(envi::Interleave::Bsq, envi::Interleave::Bil,
                                         envi::Interleave::Bip),
                       ::testing::Values(envi::ByteOrder::Little, envi::ByteOrder::Big)));
