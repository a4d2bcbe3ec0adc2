// hsiseg: command-line front end for evaluation, segmentation, phantom
// generation, raster conversion and the interactive HTTP service.

#include <charconv>
#include <csignal>
#include <pthread.h>
#include <thread>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hsiseg/backend.hpp"
#include "hsiseg/dataset.hpp"
#include "hsiseg/envi.hpp"
#include "hsiseg/eval.hpp"
#include "hsiseg/phantom.hpp"
#include "hsiseg/png.hpp"
#include "hsiseg/remote.hpp"
#include "hsiseg/report.hpp"
#include "hsiseg/service.hpp"

namespace fs = std::filesystem;
using namespace hsiseg;

namespace {

constexpr const char* kMethods = "pcc, sa, sa-eq, remote:<url>";

class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

std::vector<std::size_t> parse_list(const std::string& text, std::size_t expected,
                                    const std::string& what) {
    std::vector<std::size_t> out;
    std::string_view rest = text;
    while (true) {
        auto comma = rest.find(',');
        auto item = rest.substr(0, comma);
        std::size_t v = 0;
        auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size()) {
            throw UsageError("malformed " + what + " '" + text + "'");
        }
        out.push_back(v);
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    if (out.size() != expected) throw UsageError("malformed " + what + " '" + text + "'");
    return out;
}

BandTriple parse_bands(const std::string& text) {
    auto v = parse_list(text, 3, "band triple (expected r,g,b)");
    return {v[0], v[1], v[2]};
}

Pixel parse_click(const std::string& text) {
    auto v = parse_list(text, 2, "click (expected row,col)");
    return {v[0], v[1]};
}

std::unique_ptr<SegmentationBackend> make_backend(const std::string& method,
                                                  std::chrono::milliseconds timeout) {
    if (method.rfind("remote:", 0) == 0) return remote_backend(method.substr(7), timeout);
    try {
        return scf_backend(parse_scf_kind(method));
    } catch (const std::invalid_argument&) {
        throw UsageError("unknown method '" + method + "'; valid methods: " + kMethods);
    }
}

ThresholdSweep parse_sweep(const std::string& text) {
    if (text == "exact") return {};
    if (text.rfind("grid:", 0) == 0) {
        auto v = parse_list(text.substr(5), 1, "sweep (expected exact or grid:N)");
        if (v[0] == 0) throw UsageError("grid sweep needs at least one step");
        return {v[0]};
    }
    throw UsageError("malformed sweep '" + text + "' (expected exact or grid:N)");
}

// ---------------------------------------------------------------- eval

struct EvalOptions {
    std::string manifest;
    std::string data_dir;
    std::string method = "sa";
    std::size_t max_clicks = 5;
    double threshold = 0.5;
    std::int32_t ignore_index = 255;
    std::string bands;
    std::size_t jobs = 1;
    std::uint64_t seed = 0;
    std::string out = "report";
    std::string sweep = "exact";
    int connectivity = 4;
    int timeout_ms = 30000;
    std::string dataset_name;
};

// Fills options not given on the command line from the JSON manifest.
void apply_manifest(EvalOptions& o, CLI::App& cmd) {
    if (o.manifest.empty()) return;
    std::ifstream in(o.manifest);
    if (!in) throw UsageError("cannot open manifest " + o.manifest);
    auto doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw UsageError("manifest is not a JSON object");

    auto take = [&](const char* key, const char* flag, auto& field) {
        if (doc.contains(key) && cmd.count(flag) == 0) {
            field = doc[key].get<std::remove_reference_t<decltype(field)>>();
        }
    };
    take("data_dir", "--data-dir", o.data_dir);
    take("method", "--method", o.method);
    take("max_clicks", "--max-clicks", o.max_clicks);
    take("threshold", "--threshold", o.threshold);
    take("ignore_index", "--ignore-index", o.ignore_index);
    take("bands", "--bands", o.bands);
    take("jobs", "--jobs", o.jobs);
    take("seed", "--seed", o.seed);
    take("out", "--out", o.out);
    take("sweep", "--sweep", o.sweep);
    take("connectivity", "--connectivity", o.connectivity);
    take("timeout_ms", "--timeout-ms", o.timeout_ms);
    take("dataset_name", "--dataset-name", o.dataset_name);

    // Relative paths in a manifest resolve against the manifest's directory.
    const fs::path base = fs::path(o.manifest).parent_path();
    if (cmd.count("--data-dir") == 0 && fs::path(o.data_dir).is_relative()) {
        o.data_dir = (base / o.data_dir).string();
    }
}

int run_eval(EvalOptions& o, CLI::App& cmd) {
    apply_manifest(o, cmd);
    if (o.data_dir.empty()) throw UsageError("--data-dir (or manifest data_dir) is required");
    if (!fs::is_directory(o.data_dir)) throw UsageError("data directory not found: " + o.data_dir);

    EvalConfig config;
    config.max_clicks = o.max_clicks;
    config.threshold = o.threshold;
    config.ignore_index = o.ignore_index;
    config.sweep = parse_sweep(o.sweep);
    if (o.connectivity != 4 && o.connectivity != 8) throw UsageError("--connectivity must be 4 or 8");
    config.connectivity = o.connectivity == 8 ? Connectivity::Eight : Connectivity::Four;

    auto backend = make_backend(o.method, std::chrono::milliseconds(o.timeout_ms));
    std::optional<BandTriple> bands;
    if (!o.bands.empty()) bands = parse_bands(o.bands);

    auto items = dataset::load(o.data_dir, o.ignore_index, bands);
    const std::string name =
        o.dataset_name.empty() ? fs::path(o.data_dir).lexically_normal().filename().string()
                               : o.dataset_name;
    EvalReport report = evaluate_dataset(*backend, items, config, o.jobs, name);
    report::write(report, o.out);
    std::cout << report::summary_line(report) << "\n";
    return 0;
}

// ---------------------------------------------------------------- segment

struct SegmentOptions {
    std::string cube;
    std::vector<std::string> clicks;
    std::string method = "sa";
    std::string out;
    std::string bands;
    int timeout_ms = 30000;
};

int run_segment(const SegmentOptions& o) {
    ClickSet clicks;
    for (const auto& c : o.clicks) {
        Pixel p = parse_click(c);
        if (clicks.contains(p)) throw UsageError("duplicate click " + c);
        clicks.add(p);
    }
    auto backend = make_backend(o.method, std::chrono::milliseconds(o.timeout_ms));
    HyperCube cube = envi::load_envi(o.cube);
    validate_clicks(clicks, cube.height(), cube.width());
    PseudoRgb rgb = pseudo_rgb(cube, o.bands.empty() ? default_bands(cube.bands()) : parse_bands(o.bands));
    ScoreMap scores = backend->segment(cube, rgb, clicks);

    const fs::path header = fs::path(o.out + ".hdr");
    if (header.has_parent_path()) fs::create_directories(header.parent_path());
    HyperCube as_cube(scores.height(), scores.width(), 1,
                      std::vector<double>(scores.values().begin(), scores.values().end()));
    envi::write_envi(header, as_cube, {.data_type = envi::DataType::Float32});

    png::Image preview{scores.width(), scores.height(), 1, {}};
    for (double v : scores.values()) {
        preview.pixels.push_back(static_cast<std::uint8_t>(std::lround(v * 255.0)));
    }
    png::write_file(o.out + "_preview.png", png::encode(preview));
    std::cout << "wrote " << header.string() << " and " << o.out << "_preview.png\n";
    return 0;
}

// ---------------------------------------------------------------- synth

struct SynthOptions {
    std::string out;
    std::string name = "phantom";
    std::size_t count = 1;
    phantom::PhantomSpec spec;
    std::string regions = "voronoi";
    bool no_brightness = false;
};

int run_synth(SynthOptions& o) {
    o.spec.region_style = phantom::parse_region_style(o.regions);
    o.spec.brightness_jitter = !o.no_brightness;
    const std::uint64_t base_seed = o.spec.seed;
    for (std::size_t i = 0; i < o.count; ++i) {
        phantom::PhantomSpec spec = o.spec;
        spec.seed = base_seed + i;
        std::string id = o.name;
        if (o.count > 1) {
            char suffix[16];
            std::snprintf(suffix, sizeof suffix, "_%03zu", i);
            id += suffix;
        }
        dataset::write_phantom(o.out, id, spec, phantom::generate(spec));
    }
    std::cout << "wrote " << o.count << " phantom(s) to " << o.out << "\n";
    return 0;
}

// ---------------------------------------------------------------- convert

struct ConvertOptions {
    std::string in;
    std::string out;
    std::string interleave;
    int data_type = 0;
    int byte_order = -1;
};

int run_convert(const ConvertOptions& o) {
    std::ifstream hdr(o.in);
    if (!hdr) throw UsageError("cannot open " + o.in);
    std::string text((std::istreambuf_iterator<char>(hdr)), std::istreambuf_iterator<char>());
    const envi::Header source = envi::parse_header(text);

    envi::WriteOptions opts{source.interleave, source.data_type, source.byte_order};
    if (!o.interleave.empty()) opts.interleave = envi::parse_interleave(o.interleave);
    if (o.data_type != 0) {
        opts.data_type = static_cast<envi::DataType>(o.data_type);
        if (envi::type_size(opts.data_type) == 0) {
            throw UsageError("unsupported data type " + std::to_string(o.data_type) +
                             " (expected 1, 2, 3, 4, 5 or 12)");
        }
    }
    if (o.byte_order > 1) throw UsageError("--byte-order must be 0 or 1");
    if (o.byte_order >= 0) opts.byte_order = static_cast<envi::ByteOrder>(o.byte_order);

    if (fs::path(o.out).has_parent_path()) fs::create_directories(fs::path(o.out).parent_path());
    envi::write_envi(o.out, envi::load_envi(o.in), opts);
    std::cout << "wrote " << o.out << " (" << envi::to_string(opts.interleave) << ")\n";
    return 0;
}

// ---------------------------------------------------------------- serve

struct ServeOptions {
    std::string bind = "127.0.0.1:8080";
    std::string data_dir;
    std::string remote;
    std::string cors;
    std::string static_dir;
    std::int32_t ignore_index = 255;
    std::size_t max_inflight = 4;
};

int run_serve(const ServeOptions& o) {
    auto colon = o.bind.rfind(':');
    if (colon == std::string::npos) throw UsageError("--bind expects host:port");
    const std::string host = o.bind.substr(0, colon);
    const int port = static_cast<int>(parse_list(o.bind.substr(colon + 1), 1, "port")[0]);

    ServiceConfig cfg;
    cfg.data_dir = o.data_dir;
    cfg.ignore_index = o.ignore_index;
    cfg.max_remote_inflight = o.max_inflight;
    if (!o.remote.empty()) cfg.remote_endpoint = o.remote;
    if (!o.cors.empty()) cfg.cors_origin = o.cors;
    if (!o.static_dir.empty()) cfg.static_dir = o.static_dir;

    // Block the shutdown signals so a dedicated thread can sigwait() for them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);
    // Shells start background jobs with SIGINT ignored, and ignored signals never reach sigwait().
    std::signal(SIGINT, SIG_DFL);
    std::signal(SIGTERM, SIG_DFL);

    Service service(cfg);
    const int bound = service.bind(host, port);
    std::cout << "listening on http://" << host << ":" << bound << std::endl;
    std::jthread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        service.stop();
    });
    service.listen();
    // listen() can also return on its own; wake the waiter so it joins.
    pthread_kill(waiter.native_handle(), SIGTERM);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interactive hyperspectral segmentation toolkit", "hsiseg"};
    app.require_subcommand(1);

    EvalOptions eval_opts;
    auto* eval = app.add_subcommand("eval", "Run the simulated-click evaluation over a dataset");
    eval->add_option("--manifest", eval_opts.manifest, "JSON run manifest; flags override its keys");
    eval->add_option("--data-dir", eval_opts.data_dir, "Directory of <id>.hdr cubes with <id>_labels.hdr");
    eval->add_option("--method", eval_opts.method, std::string("Backend: ") + kMethods)->capture_default_str();
    eval->add_option("--max-clicks", eval_opts.max_clicks, "Clicks per task (K)")->capture_default_str();
    eval->add_option("--threshold", eval_opts.threshold, "Decision threshold tau")->capture_default_str();
    eval->add_option("--ignore-index", eval_opts.ignore_index, "Label value excluded from scoring")->capture_default_str();
    eval->add_option("--bands", eval_opts.bands, "Pseudo-RGB bands r,g,b (default: last,middle,first)");
    eval->add_option("--jobs", eval_opts.jobs, "Parallel sessions; output does not depend on it")->capture_default_str();
    eval->add_option("--seed", eval_opts.seed, "Seed recorded for the run")->capture_default_str();
    eval->add_option("--out", eval_opts.out, "Output prefix for <out>.json and <out>.csv")->capture_default_str();
    eval->add_option("--sweep", eval_opts.sweep, "DICE@Max search: exact or grid:N")->capture_default_str();
    eval->add_option("--connectivity", eval_opts.connectivity, "Component connectivity for the first click (4 or 8)")->capture_default_str();
    eval->add_option("--timeout-ms", eval_opts.timeout_ms, "Remote backend timeout")->capture_default_str();
    eval->add_option("--dataset-name", eval_opts.dataset_name, "Dataset label in the report (default: directory name)");

    SegmentOptions seg_opts;
    auto* segment = app.add_subcommand("segment", "Segment one cube from clicks");
    segment->add_option("--cube", seg_opts.cube, "ENVI header of the cube")->required();
    segment->add_option("--click", seg_opts.clicks, "Click row,col (repeatable, in order)")->required();
    segment->add_option("--method", seg_opts.method, std::string("Backend: ") + kMethods)->capture_default_str();
    segment->add_option("--out", seg_opts.out, "Output prefix: <out>.hdr/.raw and <out>_preview.png")->required();
    segment->add_option("--bands", seg_opts.bands, "Pseudo-RGB bands r,g,b");
    segment->add_option("--timeout-ms", seg_opts.timeout_ms, "Remote backend timeout")->capture_default_str();

    SynthOptions synth_opts;
    auto* synth = app.add_subcommand("synth", "Generate synthetic labeled cubes");
    synth->add_option("--out", synth_opts.out, "Output directory")->required();
    synth->add_option("--name", synth_opts.name, "Image id (suffixed _000.. when --count > 1)")->capture_default_str();
    synth->add_option("--count", synth_opts.count, "Number of scenes; scene i uses seed + i")->capture_default_str();
    synth->add_option("--height", synth_opts.spec.height, "Rows")->capture_default_str();
    synth->add_option("--width", synth_opts.spec.width, "Columns")->capture_default_str();
    synth->add_option("--bands", synth_opts.spec.bands, "Spectral bands")->capture_default_str();
    synth->add_option("--materials", synth_opts.spec.n_materials, "Number of materials (classes)")->capture_default_str();
    synth->add_option("--noise", synth_opts.spec.noise_sigma, "Gaussian noise sigma")->capture_default_str();
    synth->add_option("--seed", synth_opts.spec.seed, "Generator seed")->capture_default_str();
    synth->add_option("--regions", synth_opts.regions, "Region layout: voronoi or blobs")->capture_default_str();
    synth->add_flag("--no-brightness", synth_opts.no_brightness, "Disable per-pixel brightness jitter");

    ConvertOptions conv_opts;
    auto* convert = app.add_subcommand("convert", "Rewrite an ENVI raster with another layout");
    convert->add_option("--in", conv_opts.in, "Input header")->required();
    convert->add_option("--out", conv_opts.out, "Output header")->required();
    convert->add_option("--interleave", conv_opts.interleave, "bsq, bil or bip (default: keep)");
    convert->add_option("--data-type", conv_opts.data_type, "ENVI data type code (default: keep)");
    convert->add_option("--byte-order", conv_opts.byte_order, "0 little, 1 big (default: keep)");

    ServeOptions serve_opts;
    auto* serve = app.add_subcommand("serve", "Serve the interactive segmentation HTTP API");
    serve->add_option("--bind", serve_opts.bind, "host:port to listen on")->capture_default_str();
    serve->add_option("--data-dir", serve_opts.data_dir, "Directory of cubes to expose")->required();
    serve->add_option("--remote", serve_opts.remote, "Endpoint of an external fusion backend");
    serve->add_option("--cors", serve_opts.cors, "Allowed CORS origin");
    serve->add_option("--static-dir", serve_opts.static_dir, "Directory of UI assets served at /");
    serve->add_option("--ignore-index", serve_opts.ignore_index, "Label value excluded from live Dice")->capture_default_str();
    serve->add_option("--max-inflight", serve_opts.max_inflight, "Concurrent remote-backend calls")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*eval) return run_eval(eval_opts, *eval);
        if (*segment) return run_segment(seg_opts);
        if (*synth) return run_synth(synth_opts);
        if (*convert) return run_convert(conv_opts);
        if (*serve) return run_serve(serve_opts);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
