#include "hsiseg/dataset.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "hsiseg/envi.hpp"

namespace hsiseg::dataset {
namespace fs = std::filesystem;

namespace {

constexpr std::string_view kLabelSuffix = "_labels";

bool ends_with(const std::string& s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

std::vector<Entry> scan(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw Error("not a directory: " + dir.string());
    std::vector<Entry> out;
    for (const auto& f : fs::directory_iterator(dir)) {
        if (!f.is_regular_file() || f.path().extension() != ".hdr") continue;
        std::string id = f.path().stem().string();
        if (ends_with(id, kLabelSuffix)) continue;
        Entry e{id, f.path(), std::nullopt};
        fs::path labels = dir / (id + std::string(kLabelSuffix) + ".hdr");
        if (fs::is_regular_file(labels)) e.labels_header = labels;
        out.push_back(std::move(e));
    }
    std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) { return a.id < b.id; });
    return out;
}

DatasetItem load_entry(const Entry& entry, std::int32_t ignore_index,
                       std::optional<BandTriple> bands) {
    if (!entry.labels_header) throw Error("image '" + entry.id + "' has no label raster");
    HyperCube cube = envi::load_envi(entry.cube_header);
    LabelMap labels = envi::load_labels(*entry.labels_header, ignore_index);
    validate_pair(cube, labels);
    PseudoRgb rgb = pseudo_rgb(cube, bands.value_or(default_bands(cube.bands())));
    return {entry.id, std::move(cube), std::move(labels), std::move(rgb)};
}

std::vector<DatasetItem> load(const fs::path& dir, std::int32_t ignore_index,
                              std::optional<BandTriple> bands) {
    std::vector<DatasetItem> out;
    for (const auto& entry : scan(dir)) {
        if (entry.labels_header) out.push_back(load_entry(entry, ignore_index, bands));
    }
    return out;
}

std::string phantom_manifest(const phantom::PhantomSpec& spec) {
    nlohmann::ordered_json doc = {
        {"height", spec.height},
        {"width", spec.width},
        {"bands", spec.bands},
        {"n_materials", spec.n_materials},
        {"noise_sigma", spec.noise_sigma},
        {"seed", spec.seed},
        {"region_style", std::string(phantom::to_string(spec.region_style))},
        {"brightness_jitter", spec.brightness_jitter},
        {"ignore_index", phantom::kIgnoreIndex},
    };
    return doc.dump(2) + "\n";
}

void write_phantom(const fs::path& dir, const std::string& id, const phantom::PhantomSpec& spec,
                   const phantom::Phantom& scene) {
    fs::create_directories(dir);
    envi::write_envi(dir / (id + ".hdr"), scene.cube, {.data_type = envi::DataType::Float32});
    envi::write_labels(dir / (id + std::string(kLabelSuffix) + ".hdr"), scene.labels);
    std::ofstream(dir / (id + ".json"), std::ios::trunc) << phantom_manifest(spec);
}

}  // namespace hsiseg::dataset
