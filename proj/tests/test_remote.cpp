#include <chrono>
#include <thread>

#include <gtest/gtest.h>

#include "hsiseg/backend.hpp"
#include "hsiseg/eval.hpp"
#include "hsiseg/imgproc.hpp"
#include "hsiseg/remote.hpp"
#include "support/mock_server.hpp"
#include "support/random.hpp"

using namespace hsiseg;
using hsiseg::testing::MockFusionServer;
using hsiseg::testing::MockMode;
using wire::RemoteError;
using wire::RemoteErrorKind;

namespace {

struct Scene {
    HyperCube cube;
    PseudoRgb rgb;
};

Scene scene(std::uint64_t seed, std::size_t h = 9, std::size_t w = 7) {
    hsiseg::testing::Rng rng(seed);
    HyperCube cube = hsiseg::testing::random_cube(rng, h, w, 6);
    PseudoRgb rgb = pseudo_rgb(cube, default_bands(6));
    return {std::move(cube), std::move(rgb)};
}

RemoteErrorKind failure_kind(MockMode mode) {
    MockFusionServer server(mode);
    RemoteBackend backend(server.endpoint(), std::chrono::milliseconds(2000));
    Scene s = scene(1);
    try {
        backend.segment(s.cube, s.rgb, {{2, 2}});
    } catch (const RemoteError& e) {
        return e.kind();
    }
    ADD_FAILURE() << "mock mode " << static_cast<int>(mode) << " produced a score map";
    return RemoteErrorKind::Transport;
}

}  // namespace

TEST(RemoteBackend, EchoReturnsPromptAtFloatPrecision) {
    MockFusionServer server(MockMode::Echo);
    RemoteBackend backend(server.endpoint(), std::chrono::seconds(5));
    Scene s = scene(2);
    ClickSet clicks{{1, 1}, {6, 4}};
    ScoreMap got = backend.segment(s.cube, s.rgb, clicks);
    FusionInput expected = build_fusion_input(s.cube, s.rgb, clicks);
    ASSERT_EQ(got.height(), expected.spectral_prompt.height());
    for (std::size_t i = 0; i < got.size(); ++i) {
        EXPECT_EQ(got.values()[i], static_cast<double>(static_cast<float>(expected.spectral_prompt.values()[i])));
    }
    EXPECT_EQ(server.request_count(), 1u);
    wire::SegmentRequest req = server.last_request();
    EXPECT_EQ(req.clicks, clicks.points());
    EXPECT_EQ(backend.name(), "remote:" + server.endpoint());
}

TEST(RemoteBackend, BasePathIsHonoured) {
    MockFusionServer server(MockMode::Echo, "/v1/model");
    RemoteBackend backend(server.endpoint() + "/", std::chrono::seconds(5));
    Scene s = scene(3);
    EXPECT_NO_THROW(backend.segment(s.cube, s.rgb, {{0, 0}}));
    EXPECT_EQ(server.request_count(), 1u);
}

TEST(RemoteBackend, LowerResolutionRgbIsResizedBack) {
    MockFusionServer server(MockMode::Echo);
    RemoteBackend backend(server.endpoint(), std::chrono::seconds(5));
    Scene s = scene(4, 8, 8);
    hsiseg::testing::Rng rng(5);
    PseudoRgb small(4, 4, hsiseg::testing::uniform_values(rng, 48));
    ScoreMap got = backend.segment(s.cube, small, {{5, 5}});
    EXPECT_EQ(got.height(), 8u);
    EXPECT_EQ(got.width(), 8u);
    EXPECT_EQ(server.last_request().height, 4u);
    EXPECT_EQ(server.last_request().clicks, (std::vector<Pixel>{{3, 3}}));
}

TEST(RemoteBackend, MalformedResponsesRaiseTypedErrors) {
    EXPECT_EQ(failure_kind(MockMode::WrongShape), RemoteErrorKind::ShapeMismatch);
    EXPECT_EQ(failure_kind(MockMode::OutOfRange), RemoteErrorKind::OutOfRange);
    EXPECT_EQ(failure_kind(MockMode::NaNScore), RemoteErrorKind::OutOfRange);
    EXPECT_EQ(failure_kind(MockMode::NotJson), RemoteErrorKind::Malformed);
    EXPECT_EQ(failure_kind(MockMode::BadBase64), RemoteErrorKind::Malformed);
    EXPECT_EQ(failure_kind(MockMode::ShortPayload), RemoteErrorKind::Malformed);
    EXPECT_EQ(failure_kind(MockMode::MissingField), RemoteErrorKind::Malformed);
    EXPECT_EQ(failure_kind(MockMode::WrongRequestId), RemoteErrorKind::Malformed);
    EXPECT_EQ(failure_kind(MockMode::Status500), RemoteErrorKind::Status);
}

TEST(RemoteBackend, Timeout) {
    MockFusionServer server(MockMode::Slow, "", std::chrono::milliseconds(1500));
    RemoteBackend backend(server.endpoint(), std::chrono::milliseconds(200));
    Scene s = scene(6);
    try {
        backend.segment(s.cube, s.rgb, {{0, 0}});
        FAIL() << "expected timeout";
    } catch (const RemoteError& e) {
        EXPECT_EQ(e.kind(), RemoteErrorKind::Timeout);
    }
}

TEST(RemoteBackend, ConnectionRefused) {
    int port = 0;
    {
        MockFusionServer server(MockMode::Echo);
        port = server.port();
    }
    RemoteBackend backend("http://127.0.0.1:" + std::to_string(port), std::chrono::milliseconds(500));
    Scene s = scene(7);
    try {
        backend.segment(s.cube, s.rgb, {{0, 0}});
        FAIL() << "expected transport error";
    } catch (const RemoteError& e) {
        EXPECT_TRUE(e.kind() == RemoteErrorKind::Transport || e.kind() == RemoteErrorKind::Timeout);
    }
}

TEST(RemoteBackend, RejectsBadEndpoint) {
    EXPECT_THROW(RemoteBackend("ftp://x", std::chrono::seconds(1)), std::invalid_argument);
    EXPECT_THROW(RemoteBackend("localhost:8000", std::chrono::seconds(1)), std::invalid_argument);
}

TEST(RemoteBackend, ConcurrentSessionsThroughHarness) {
    MockFusionServer server(MockMode::Echo);
    auto backend = remote_backend(server.endpoint(), std::chrono::seconds(5));
    std::vector<DatasetItem> data;
    hsiseg::testing::Rng rng(8);
    for (int i = 0; i < 4; ++i) {
        HyperCube cube = hsiseg::testing::random_cube(rng, 6, 6, 4);
        std::vector<std::int32_t> labels(36);
        for (std::size_t p = 0; p < 36; ++p) labels[p] = static_cast<std::int32_t>(p % 6 < 3);
        PseudoRgb rgb = pseudo_rgb(cube, default_bands(4));
        data.push_back({"r" + std::to_string(i), std::move(cube),
                        LabelMap(Grid<std::int32_t>(6, 6, labels), 255), std::move(rgb)});
    }
    EvalConfig cfg;
    cfg.max_clicks = 3;
    EvalReport r = evaluate_dataset(*backend, data, cfg, 4);
    EXPECT_EQ(r.task_count(), 8u);
    EXPECT_EQ(server.request_count(), 24u);
}

TEST(RemoteBackend, FailureInHarnessIsSessionError) {
    MockFusionServer server(MockMode::OutOfRange);
    auto backend = remote_backend(server.endpoint(), std::chrono::seconds(5));
    Scene s = scene(9);
    std::vector<DatasetItem> data{{"x", s.cube, LabelMap(Grid<std::int32_t>(9, 7, 0), 255), s.rgb}};
    EXPECT_THROW(evaluate_dataset(*backend, data, EvalConfig{}), SessionError);
}
