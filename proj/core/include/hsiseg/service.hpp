#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace hsiseg {

struct ServiceConfig {
    std::filesystem::path data_dir;
    std::optional<std::string> remote_endpoint;
    std::optional<std::string> cors_origin;
    std::optional<std::filesystem::path> static_dir;
    std::int32_t ignore_index = 255;
    std::size_t max_remote_inflight = 4;
    std::chrono::milliseconds remote_timeout = std::chrono::seconds(30);
};

/// HTTP API over a directory of cubes, for the interactive UI.
///
///   GET  /api/images
///   GET  /api/images/{id}/preview?bands=r,g,b      -> image/png
///   POST /api/images/{id}/segment                   -> {height, width, scores_b64, dice?}
///   GET  /api/images/{id}/spectrum?row=&col=        -> {values, wavelengths?}
///
/// Requests are stateless: every segment call carries the full click list.
/// Errors are JSON `{"error": "..."}`.
class Service {
  public:
    struct Response {
        int status = 200;
        std::string content_type = "application/json";
        std::string body;
    };

    /// Scans and loads the data directory. Unreadable images are skipped with
    /// a warning. Throws hsiseg::Error when the directory itself is unusable.
    explicit Service(ServiceConfig config);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    Response list_images() const;
    Response preview(const std::string& id, const std::optional<std::string>& bands) const;
    Response segment(const std::string& id, const std::string& body) const;
    Response spectrum(const std::string& id, const std::optional<std::string>& row,
                      const std::optional<std::string>& col) const;

    /// Binds the listening socket; port 0 picks a free port. Returns the bound
    /// port. Throws hsiseg::Error when the address cannot be bound.
    int bind(const std::string& host, int port);
    /// Serves until stop() is called. Requires a successful bind().
    void listen();
    void stop();

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace hsiseg
