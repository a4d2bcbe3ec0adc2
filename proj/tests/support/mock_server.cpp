#include "support/mock_server.hpp"

#include <cmath>
#include <limits>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace hsiseg::testing {

struct MockFusionServer::Impl {
    httplib::Server server;
    std::thread thread;
};

MockFusionServer::MockFusionServer(MockMode mode, std::string base_path,
                                   std::chrono::milliseconds delay)
    : impl_(std::make_unique<Impl>()), base_path_(std::move(base_path)) {
    impl_->server.Post(base_path_ + "/segment", [this, mode, delay](const httplib::Request& req,
                                                                    httplib::Response& res) {
        ++requests_;
        wire::SegmentRequest in;
        try {
            in = wire::decode_request(req.body);
        } catch (const std::exception& e) {
            res.status = 400;
            res.set_content(wire::error_body(e.what()), "application/json");
            return;
        }
        {
            std::lock_guard lock(mutex_);
            last_ = in;
        }
        res.set_header("X-Request-Id", mode == MockMode::WrongRequestId
                                           ? std::string("bogus")
                                           : req.get_header_value("X-Request-Id"));

        std::vector<double> scores = in.prompt;
        std::size_t h = in.height, w = in.width;
        std::string body;
        switch (mode) {
            case MockMode::Echo:
            case MockMode::WrongRequestId:
                break;
            case MockMode::Slow:
                std::this_thread::sleep_for(delay);
                break;
            case MockMode::WrongShape:
                ++h;
                scores.resize(h * w, 0.5);
                break;
            case MockMode::OutOfRange:
                scores[0] = 1.5;
                break;
            case MockMode::NaNScore:
                scores[0] = std::numeric_limits<double>::quiet_NaN();
                break;
            case MockMode::NotJson:
                body = "<html>not json</html>";
                break;
            case MockMode::BadBase64:
                body = nlohmann::json{{"height", h}, {"width", w}, {"scores_b64", "@@@="}}.dump();
                break;
            case MockMode::ShortPayload:
                scores.pop_back();
                body = nlohmann::json{{"height", h},
                                      {"width", w},
                                      {"scores_b64", wire::base64_encode(wire::encode_f32le(scores))}}
                           .dump();
                break;
            case MockMode::MissingField:
                body = nlohmann::json{{"height", h}, {"width", w}}.dump();
                break;
            case MockMode::Status500:
                res.status = 500;
                res.set_content(wire::error_body("model crashed"), "application/json");
                return;
        }
        if (body.empty()) body = wire::encode_response(h, w, scores);
        res.set_content(body, "application/json");
    });
    port_ = impl_->server.bind_to_any_port("127.0.0.1");
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

MockFusionServer::~MockFusionServer() {
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

std::string MockFusionServer::endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port_) + base_path_;
}

wire::SegmentRequest MockFusionServer::last_request() const {
    std::lock_guard lock(mutex_);
    return last_;
}

}  // namespace hsiseg::testing
