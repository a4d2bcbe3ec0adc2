#include "hsiseg/service.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <semaphore>

#include <httplib.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "hsiseg/backend.hpp"
#include "hsiseg/dataset.hpp"
#include "hsiseg/envi.hpp"
#include "hsiseg/metrics.hpp"
#include "hsiseg/png.hpp"
#include "hsiseg/remote.hpp"

namespace hsiseg {
namespace {

using nlohmann::json;
using Response = Service::Response;

struct Image {
    std::string id;
    HyperCube cube;
    std::optional<LabelMap> labels;
};

Response error(int status, const std::string& message) {
    return {status, "application/json", wire::error_body(message)};
}

Response ok_json(const json& doc) { return {200, "application/json", doc.dump()}; }

std::optional<long long> parse_int(std::string_view text) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
    return v;
}

// "r,g,b" with in-range indices.
std::optional<BandTriple> parse_bands(std::string_view text, std::size_t band_count) {
    std::size_t idx[3];
    for (int i = 0; i < 3; ++i) {
        auto comma = text.find(',');
        if ((i < 2) == (comma == std::string_view::npos)) return std::nullopt;
        auto v = parse_int(text.substr(0, comma));
        if (!v || *v < 0 || static_cast<std::size_t>(*v) >= band_count) return std::nullopt;
        idx[i] = static_cast<std::size_t>(*v);
        if (i < 2) text.remove_prefix(comma + 1);
    }
    return BandTriple{idx[0], idx[1], idx[2]};
}

}  // namespace

struct Service::Impl {
    ServiceConfig config;
    std::map<std::string, Image> images;
    std::unique_ptr<RemoteBackend> remote;
    mutable std::counting_semaphore<1024> remote_slots;
    httplib::Server server;

    explicit Impl(ServiceConfig cfg)
        : config(std::move(cfg)),
          remote_slots(static_cast<std::ptrdiff_t>(std::clamp<std::size_t>(config.max_remote_inflight, 1, 1024))) {}

    const Image* find(const std::string& id) const {
        auto it = images.find(id);
        return it == images.end() ? nullptr : &it->second;
    }

    ScoreMap run(const std::string& method, const Image& img, const PseudoRgb& rgb,
                 const ClickSet& clicks) const {
        if (method == "remote") {
            remote_slots.acquire();
            struct Release {
                std::counting_semaphore<1024>& s;
                ~Release() { s.release(); }
            } release{remote_slots};
            return remote->segment(img.cube, rgb, clicks);
        }
        return ScfBackend(parse_scf_kind(method)).segment(img.cube, rgb, clicks);
    }
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {
    for (const auto& entry : dataset::scan(impl_->config.data_dir)) {
        try {
            Image img{entry.id, envi::load_envi(entry.cube_header), std::nullopt};
            if (entry.labels_header) {
                img.labels = envi::load_labels(*entry.labels_header, impl_->config.ignore_index);
                validate_pair(img.cube, *img.labels);
            }
            impl_->images.emplace(entry.id, std::move(img));
        } catch (const std::exception& e) {
            spdlog::warn("skipping image '{}': {}", entry.id, e.what());
        }
    }
    if (impl_->config.remote_endpoint) {
        impl_->remote = std::make_unique<RemoteBackend>(*impl_->config.remote_endpoint,
                                                        impl_->config.remote_timeout);
    }
    spdlog::info("loaded {} image(s) from {}", impl_->images.size(),
                 impl_->config.data_dir.string());
}

Service::~Service() = default;

Response Service::list_images() const {
    json out = json::array();
    for (const auto& [id, img] : impl_->images) {
        out.push_back({{"id", id},
                       {"height", img.cube.height()},
                       {"width", img.cube.width()},
                       {"bands", img.cube.bands()},
                       {"has_labels", img.labels.has_value()}});
    }
    return ok_json(out);
}

Response Service::preview(const std::string& id, const std::optional<std::string>& bands) const {
    const Image* img = impl_->find(id);
    if (!img) return error(404, "unknown image '" + id + "'");
    BandTriple triple = default_bands(img->cube.bands());
    if (bands) {
        auto parsed = parse_bands(*bands, img->cube.bands());
        if (!parsed) return error(400, "bad bands '" + *bands + "'");
        triple = *parsed;
    }
    PseudoRgb rgb = pseudo_rgb(img->cube, triple, RgbNormalization::PerBandMinMax);
    png::Image out{rgb.width(), rgb.height(), 3, {}};
    out.pixels.reserve(rgb.data().size());
    for (double v : rgb.data()) out.pixels.push_back(static_cast<std::uint8_t>(std::lround(v * 255.0)));
    return {200, "image/png", png::encode(out)};
}

Response Service::segment(const std::string& id, const std::string& body) const {
    const Image* img = impl_->find(id);
    if (!img) return error(404, "unknown image '" + id + "'");

    json req = json::parse(body, nullptr, false);
    if (req.is_discarded() || !req.is_object()) return error(400, "request body must be JSON");

    const std::string method = req.value("method", std::string("sa"));
    if (method == "remote") {
        if (!impl_->remote) return error(400, "no remote backend configured (start with --remote)");
    } else if (method != "pcc" && method != "sa" && method != "sa-eq") {
        return error(400, "unknown method '" + method + "' (expected pcc, sa, sa-eq or remote)");
    }

    if (!req.contains("clicks") || !req["clicks"].is_array() || req["clicks"].empty()) {
        return error(400, "clicks must be a non-empty array of [row, col]");
    }
    ClickSet clicks;
    for (const auto& c : req["clicks"]) {
        if (!c.is_array() || c.size() != 2 || !c[0].is_number_integer() ||
            !c[1].is_number_integer()) {
            return error(400, "click must be [row, col]");
        }
        const auto r = c[0].get<long long>(), col = c[1].get<long long>();
        if (r < 0 || col < 0 || static_cast<std::size_t>(r) >= img->cube.height() ||
            static_cast<std::size_t>(col) >= img->cube.width()) {
            return error(400, "click (" + std::to_string(r) + "," + std::to_string(col) +
                                  ") is outside the image");
        }
        Pixel p{static_cast<std::size_t>(r), static_cast<std::size_t>(col)};
        if (clicks.contains(p)) return error(400, "duplicate click");
        clicks.add(p);
    }

    BandTriple triple = default_bands(img->cube.bands());
    if (req.contains("bands")) {
        const auto& b = req["bands"];
        std::string text;
        if (b.is_array() && b.size() == 3 && b[0].is_number_integer() &&
            b[1].is_number_integer() && b[2].is_number_integer()) {
            text = std::to_string(b[0].get<long long>()) + "," + std::to_string(b[1].get<long long>()) +
                   "," + std::to_string(b[2].get<long long>());
        }
        auto parsed = parse_bands(text, img->cube.bands());
        if (!parsed) return error(400, "bad bands");
        triple = *parsed;
    }

    std::optional<std::int32_t> class_id;
    if (req.contains("class_id") && !req["class_id"].is_null()) {
        if (!req["class_id"].is_number_integer()) return error(400, "class_id must be an integer");
        class_id = req["class_id"].get<std::int32_t>();
    }

    ScoreMap scores;
    try {
        scores = impl_->run(method, *img, pseudo_rgb(img->cube, triple), clicks);
    } catch (const wire::RemoteError& e) {
        return error(502, e.what());
    } catch (const std::invalid_argument& e) {
        return error(400, e.what());
    }

    json out = {{"height", scores.height()},
                {"width", scores.width()},
                {"scores_b64", wire::base64_encode(wire::encode_f32le(scores.values()))}};
    if (class_id && img->labels) {
        const BinaryMask fg = img->labels->class_mask(*class_id);
        const BinaryMask valid = img->labels->valid_mask();
        const DiceAtMax best = dice_at_max(scores, fg, valid);
        out["dice"] = {{"at_05", dice(threshold_scores(scores, 0.5), fg, valid)},
                       {"at_max", best.dice},
                       {"best_tau", best.best_tau}};
    }
    return ok_json(out);
}

Response Service::spectrum(const std::string& id, const std::optional<std::string>& row,
                           const std::optional<std::string>& col) const {
    const Image* img = impl_->find(id);
    if (!img) return error(404, "unknown image '" + id + "'");
    auto r = row ? parse_int(*row) : std::nullopt;
    auto c = col ? parse_int(*col) : std::nullopt;
    if (!r || !c || *r < 0 || *c < 0 || static_cast<std::size_t>(*r) >= img->cube.height() ||
        static_cast<std::size_t>(*c) >= img->cube.width()) {
        return error(400, "row/col missing or out of bounds");
    }
    const Spectrum s = spectrum_at(img->cube, static_cast<std::size_t>(*r), static_cast<std::size_t>(*c));
    json out = {{"values", s.values}};
    if (img->cube.has_wavelengths()) out["wavelengths"] = img->cube.wavelengths();
    return ok_json(out);
}

int Service::bind(const std::string& host, int port) {
    auto& srv = impl_->server;
    auto send = [this](httplib::Response& res, const Response& r) {
        res.status = r.status;
        res.set_content(r.body, r.content_type);
        if (impl_->config.cors_origin) {
            res.set_header("Access-Control-Allow-Origin", *impl_->config.cors_origin);
        }
    };
    auto param = [](const httplib::Request& req, const char* key) -> std::optional<std::string> {
        if (!req.has_param(key)) return std::nullopt;
        return req.get_param_value(key);
    };

    srv.Get("/api/images", [=, this](const httplib::Request&, httplib::Response& res) {
        send(res, list_images());
    });
    srv.Get(R"(/api/images/([^/]+)/preview)", [=, this](const httplib::Request& req, httplib::Response& res) {
        send(res, preview(req.matches[1], param(req, "bands")));
    });
    srv.Post(R"(/api/images/([^/]+)/segment)", [=, this](const httplib::Request& req, httplib::Response& res) {
        send(res, segment(req.matches[1], req.body));
    });
    srv.Get(R"(/api/images/([^/]+)/spectrum)", [=, this](const httplib::Request& req, httplib::Response& res) {
        send(res, spectrum(req.matches[1], param(req, "row"), param(req, "col")));
    });
    if (impl_->config.cors_origin) {
        srv.Options(R"(/api/.*)", [this](const httplib::Request&, httplib::Response& res) {
            res.set_header("Access-Control-Allow-Origin", *impl_->config.cors_origin);
            res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type");
            res.status = 204;
        });
    }
    if (impl_->config.static_dir && !srv.set_mount_point("/", impl_->config.static_dir->string())) {
        throw Error("static directory not found: " + impl_->config.static_dir->string());
    }
    srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "internal error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            what = e.what();
        } catch (...) {
        }
        res.status = 500;
        res.set_content(wire::error_body(what), "application/json");
    });

    // httplib defaults to SO_REUSEPORT, which would let two servers share a port.
    srv.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    int bound = port == 0 ? srv.bind_to_any_port(host) : (srv.bind_to_port(host, port) ? port : -1);
    if (bound < 0) {
        throw Error("cannot bind " + host + ":" + std::to_string(port) +
                    " (address in use or not available)");
    }
    return bound;
}

void Service::listen() { impl_->server.listen_after_bind(); }

void Service::stop() { impl_->server.stop(); }

}  // namespace hsiseg
