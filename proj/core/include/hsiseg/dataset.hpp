#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hsiseg/eval.hpp"
#include "hsiseg/phantom.hpp"

namespace hsiseg::dataset {

/// A cube found on disk: `<id>.hdr`, with labels in `<id>_labels.hdr` when present.
struct Entry {
    std::string id;
    std::filesystem::path cube_header;
    std::optional<std::filesystem::path> labels_header;
};

/// Lists cubes in `dir` (non-recursive), sorted by id.
std::vector<Entry> scan(const std::filesystem::path& dir);

/// Loads every labeled entry of `dir` as an evaluation item. The pseudo-RGB
/// uses `bands` (default_bands when empty) with per-band min-max scaling.
std::vector<DatasetItem> load(const std::filesystem::path& dir, std::int32_t ignore_index,
                              std::optional<BandTriple> bands = std::nullopt);

DatasetItem load_entry(const Entry& entry, std::int32_t ignore_index,
                       std::optional<BandTriple> bands = std::nullopt);

/// Writes `<dir>/<id>.hdr|.raw` (float32), `<dir>/<id>_labels.hdr|.raw` (uint8)
/// and `<dir>/<id>.json` holding the generator settings.
void write_phantom(const std::filesystem::path& dir, const std::string& id,
                   const phantom::PhantomSpec& spec, const phantom::Phantom& scene);

std::string phantom_manifest(const phantom::PhantomSpec& spec);

}  // namespace hsiseg::dataset
