#include <algorithm>
#include <mutex>

#include <gtest/gtest.h>

#include "hsiseg/backend.hpp"
#include "hsiseg/eval.hpp"
#include "hsiseg/imgproc.hpp"
#include "hsiseg/phantom.hpp"
#include "hsiseg/report.hpp"
#include "support/backends.hpp"
#include "support/random.hpp"

using namespace hsiseg;
using hsiseg::testing::RecordingBackend;

namespace {

// Scores 1 on pixels whose band-0 value equals that of the first click, 0 elsewhere.
// With band 0 holding the class id this is a perfect predictor.
class OracleBackend final : public SegmentationBackend {
  public:
    ScoreMap segment(const HyperCube& cube, const PseudoRgb&, const ClickSet& clicks) const override {
        const double target = cube.at(clicks[0].row, clicks[0].col, 0);
        std::vector<double> v(cube.pixel_count());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = cube.data()[i * cube.bands()] == target;
        return ScoreMap(cube.height(), cube.width(), std::move(v));
    }
    std::string name() const override { return "oracle"; }
};

class FailingBackend final : public SegmentationBackend {
  public:
    ScoreMap segment(const HyperCube&, const PseudoRgb&, const ClickSet& clicks) const override {
        if (clicks.size() >= 2) throw std::runtime_error("backend exploded");
        return ScoreMap(4, 4, std::vector<double>(16, 0.5));
    }
    std::string name() const override { return "failing"; }
};

// Cube whose single band stores the label, so OracleBackend sees classes.
DatasetItem labelled_item(const std::string& id, std::size_t h, std::size_t w,
                          std::vector<std::int32_t> labels) {
    std::vector<double> band(labels.begin(), labels.end());
    HyperCube cube(h, w, 1, band);
    LabelMap lm(Grid<std::int32_t>(h, w, std::move(labels)), 255);
    PseudoRgb rgb = pseudo_rgb(cube, {0, 0, 0});
    return {id, std::move(cube), std::move(lm), std::move(rgb)};
}

DatasetItem phantom_item(const std::string& id, std::uint64_t seed) {
    phantom::PhantomSpec spec;
    spec.height = 24;
    spec.width = 20;
    spec.bands = 12;
    spec.seed = seed;
    auto p = phantom::generate(spec);
    PseudoRgb rgb = pseudo_rgb(p.cube, default_bands(p.cube.bands()));
    return {id, std::move(p.cube), std::move(p.labels), std::move(rgb)};
}

}  // namespace

TEST(NextClick, Examples) {
    ScoreMap s(1, 3, {0.2, 0.9, 0.1});
    auto f = hsiseg::testing::full_mask(1, 3);
    EXPECT_EQ(next_click(s, f, {}), (Pixel{0, 2}));
    EXPECT_EQ(next_click(s, f, {{0, 2}}), (Pixel{0, 0}));
    EXPECT_EQ(next_click(ScoreMap(1, 2, {0.5, 0.5}), hsiseg::testing::full_mask(1, 2), {}), (Pixel{0, 0}));
}

TEST(NextClick, TiesGoToSmallestRowThenColumn) {
    ScoreMap s(3, 3, {0.9, 0.3, 0.3, 0.3, 0.9, 0.9, 0.3, 0.9, 0.9});
    BinaryMask f(3, 3, std::vector<std::uint8_t>{1, 0, 1, 1, 1, 1, 1, 1, 1});
    EXPECT_EQ(next_click(s, f, {}), (Pixel{0, 2}));
    EXPECT_EQ(next_click(s, f, {{0, 2}}), (Pixel{1, 0}));
}

TEST(NextClick, OnlyForegroundAndExhaustion) {
    ScoreMap s(1, 3, {0.0, 0.9, 0.1});
    BinaryMask f(1, 3, std::vector<std::uint8_t>{0, 1, 0});
    EXPECT_EQ(next_click(s, f, {}), (Pixel{0, 1}));
    EXPECT_THROW(next_click(s, f, {{0, 1}}), std::invalid_argument);
}

TEST(SimulateSession, OracleIsPerfectAtEveryStep) {
    DatasetItem item = labelled_item("a", 4, 4, {0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 2, 2, 2, 2});
    OracleBackend oracle;
    EvalConfig cfg;
    auto records = simulate_session(oracle, item.cube, item.rgb, item.labels.class_mask(1),
                                    item.labels.valid_mask(), cfg);
    ASSERT_EQ(records.size(), 5u);
    for (std::size_t k = 0; k < records.size(); ++k) {
        EXPECT_EQ(records[k].step, k + 1);
        EXPECT_EQ(records[k].dice_at_tau, 1.0);
        EXPECT_EQ(records[k].dice_at_max, 1.0);
    }
}

TEST(SimulateSession, SingleClickMakesOneRecord) {
    DatasetItem item = labelled_item("a", 2, 2, {0, 1, 1, 1});
    OracleBackend oracle;
    RecordingBackend rec(oracle);
    EvalConfig cfg;
    cfg.max_clicks = 1;
    auto records = simulate_session(rec, item.cube, item.rgb, item.labels.class_mask(1),
                                    item.labels.valid_mask(), cfg);
    EXPECT_EQ(records.size(), 1u);
    EXPECT_EQ(rec.calls.size(), 1u);
}

TEST(SimulateSession, ClickSequenceFollowsProtocol) {
    DatasetItem item = phantom_item("p", 3);
    auto sa = scf_backend(ScfKind::SpectralAngle);
    RecordingBackend rec(*sa);
    const BinaryMask f = item.labels.class_mask(0);
    const BinaryMask valid = item.labels.valid_mask();
    EvalConfig cfg;
    cfg.max_clicks = 6;
    auto records = simulate_session(rec, item.cube, item.rgb, f, valid, cfg);
    ASSERT_EQ(rec.calls.size(), 6u);

    EXPECT_EQ(rec.calls[0].first.size(), 1u);
    EXPECT_EQ(rec.calls[0].first[0], largest_component_center(f));
    for (std::size_t k = 1; k < rec.calls.size(); ++k) {
        const ClickSet& before = rec.calls[k - 1].first;
        const ClickSet& now = rec.calls[k].first;
        ASSERT_EQ(now.size(), k + 1);
        EXPECT_TRUE(std::equal(before.begin(), before.end(), now.begin()));
        EXPECT_EQ(now.back(), next_click(rec.calls[k - 1].second, f, before));
    }
    const ClickSet& last = rec.calls.back().first;
    for (const Pixel& p : last) EXPECT_TRUE(f[p]);
    for (std::size_t k = 0; k < records.size(); ++k) {
        EXPECT_EQ(records[k].click, rec.calls[k].first.back());
        EXPECT_EQ(records[k].dice_at_max, dice_at_max(rec.calls[k].second, f, valid).dice);
        EXPECT_EQ(records[k].dice_at_tau, dice(threshold_scores(rec.calls[k].second, 0.5), f, valid));
    }
}

TEST(SimulateSession, ExhaustedForegroundReusesClicks) {
    DatasetItem item = labelled_item("a", 2, 3, {0, 0, 0, 0, 1, 1});
    OracleBackend oracle;
    RecordingBackend rec(oracle);
    EvalConfig cfg;
    auto records = simulate_session(rec, item.cube, item.rgb, item.labels.class_mask(1),
                                    item.labels.valid_mask(), cfg);
    ASSERT_EQ(records.size(), 5u);
    EXPECT_EQ(rec.calls[1].first.size(), 2u);
    for (std::size_t k = 2; k < 5; ++k) EXPECT_EQ(rec.calls[k].first, rec.calls[1].first);
}

TEST(SimulateSession, FirstClickAvoidsIgnoredPixels) {
    // Class 1 fills the left block, but its interior is ignored in the valid mask.
    DatasetItem item = labelled_item("a", 3, 3, {1, 1, 1, 1, 1, 1, 1, 1, 1});
    BinaryMask valid(3, 3, 1);
    valid(1, 1) = 0;
    OracleBackend oracle;
    RecordingBackend rec(oracle);
    EvalConfig cfg;
    cfg.max_clicks = 1;
    simulate_session(rec, item.cube, item.rgb, item.labels.class_mask(1), valid, cfg);
    EXPECT_NE(rec.calls[0].first[0], (Pixel{1, 1}));
}

TEST(SimulateSession, NoiselessTwoMaterialPhantomSeparatesPerfectly) {
    phantom::PhantomSpec spec;
    spec.height = 32;
    spec.width = 32;
    spec.bands = 16;
    spec.n_materials = 2;
    spec.noise_sigma = 0.0;
    spec.seed = 5;
    auto p = phantom::generate(spec);
    PseudoRgb rgb = pseudo_rgb(p.cube, default_bands(16));
    auto sa = scf_backend(ScfKind::SpectralAngle);
    for (std::int32_t cls : {0, 1}) {
        auto records = simulate_session(*sa, p.cube, rgb, p.labels.class_mask(cls),
                                        p.labels.valid_mask(), EvalConfig{});
        EXPECT_EQ(records[0].dice_at_max, 1.0) << "class " << cls;
    }
}

TEST(SimulateSession, BackendFailureCarriesStep) {
    HyperCube cube(4, 4, 1, std::vector<double>(16, 1.0));
    FailingBackend failing;
    try {
        simulate_session(failing, cube, pseudo_rgb(cube, {0, 0, 0}), BinaryMask(4, 4, 1),
                         BinaryMask(4, 4, 1), EvalConfig{});
        FAIL() << "expected SessionError";
    } catch (const SessionError& e) {
        EXPECT_EQ(e.step(), 2u);
        EXPECT_NE(std::string(e.what()).find("backend exploded"), std::string::npos);
    }
}

TEST(SimulateSession, RejectsBadConfig) {
    DatasetItem item = labelled_item("a", 2, 2, {0, 1, 1, 1});
    OracleBackend oracle;
    EvalConfig cfg;
    cfg.max_clicks = 0;
    EXPECT_THROW(simulate_session(oracle, item.cube, item.rgb, item.labels.class_mask(1),
                                  item.labels.valid_mask(), cfg),
                 std::invalid_argument);
    cfg.max_clicks = 1;
    cfg.threshold = 1.5;
    EXPECT_THROW(simulate_session(oracle, item.cube, item.rgb, item.labels.class_mask(1),
                                  item.labels.valid_mask(), cfg),
                 std::invalid_argument);
}

TEST(EvaluateDataset, OracleMeansAreOne) {
    std::vector<DatasetItem> data{labelled_item("only", 2, 2, {3, 3, 3, 3})};
    EvalReport r = evaluate_dataset(OracleBackend{}, data, EvalConfig{});
    ASSERT_EQ(r.task_count(), 1u);
    EXPECT_EQ(r.dice_at_tau(1), 1.0);
    EXPECT_EQ(r.dice_at_max(5), 1.0);
    EXPECT_FALSE(r.dice_at_tau(6).has_value());
}

TEST(EvaluateDataset, TasksSortedAndIgnoredClassSkipped) {
    std::vector<DatasetItem> data{labelled_item("b", 2, 2, {2, 0, 255, 0}),
                                  labelled_item("a", 2, 2, {1, 1, 0, 0})};
    EvalReport r = evaluate_dataset(OracleBackend{}, data, EvalConfig{});
    std::vector<std::pair<std::string, std::int32_t>> keys;
    for (const auto& t : r.tasks) keys.emplace_back(t.image_id, t.class_id);
    EXPECT_EQ(keys, (std::vector<std::pair<std::string, std::int32_t>>{{"a", 0}, {"a", 1}, {"b", 0}, {"b", 2}}));
}

TEST(EvaluateDataset, ConfiguredIgnoreIndex) {
    std::vector<DatasetItem> data{labelled_item("a", 2, 2, {1, 1, 7, 0})};
    EvalConfig cfg;
    cfg.ignore_index = 7;
    EvalReport r = evaluate_dataset(OracleBackend{}, data, cfg);
    EXPECT_EQ(r.task_count(), 2u);
}

TEST(EvaluateDataset, AggregateIsStepwiseMean) {
    std::vector<TaskResult> tasks(2);
    tasks[0].steps = {{1, 0.4, 0.5, 0.1, {}}};
    tasks[1].steps = {{1, 0.8, 0.9, 0.2, {}}};
    auto agg = aggregate(tasks);
    ASSERT_EQ(agg.size(), 1u);
    EXPECT_NEAR(agg[0].mean_dice_at_tau, 0.6, 1e-15);
    EXPECT_NEAR(agg[0].mean_dice_at_max, 0.7, 1e-15);
}

TEST(EvaluateDataset, AggregateIgnoresTaskOrder) {
    hsiseg::testing::Rng rng(90);
    std::vector<TaskResult> tasks(40);
    for (auto& t : tasks)
        for (std::size_t k = 1; k <= 3; ++k) {
            auto u = hsiseg::testing::uniform_values(rng, 2);
            t.steps.push_back({k, u[0], u[1], 0.0, {}});
        }
    auto base = aggregate(tasks);
    std::shuffle(tasks.begin(), tasks.end(), rng);
    auto shuffled = aggregate(tasks);
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_NEAR(base[k].mean_dice_at_tau, shuffled[k].mean_dice_at_tau, 1e-14);
        EXPECT_NEAR(base[k].mean_dice_at_max, shuffled[k].mean_dice_at_max, 1e-14);
    }
}

TEST(EvaluateDataset, IndependentOfJobsAndInputOrder) {
    std::vector<DatasetItem> data;
    for (std::uint64_t s = 0; s < 6; ++s) data.push_back(phantom_item("img" + std::to_string(s), s));
    auto sa = scf_backend(ScfKind::SpectralAngleEqualized);
    const std::string serial = report::to_json(evaluate_dataset(*sa, data, EvalConfig{}, 1, "p"));
    for (std::size_t jobs : {2u, 3u, 8u}) {
        EXPECT_EQ(report::to_json(evaluate_dataset(*sa, data, EvalConfig{}, jobs, "p")), serial);
    }
    std::reverse(data.begin(), data.end());
    EXPECT_EQ(report::to_json(evaluate_dataset(*sa, data, EvalConfig{}, 4, "p")), serial);
}

TEST(EvaluateDataset, Errors) {
    std::vector<DatasetItem> none;
    EXPECT_THROW(evaluate_dataset(OracleBackend{}, none, EvalConfig{}), std::invalid_argument);
    std::vector<DatasetItem> dup{labelled_item("x", 1, 1, {0}), labelled_item("x", 1, 1, {1})};
    EXPECT_THROW(evaluate_dataset(OracleBackend{}, dup, EvalConfig{}), std::invalid_argument);
    std::vector<DatasetItem> ignored{labelled_item("x", 1, 2, {255, 255})};
    EXPECT_THROW(evaluate_dataset(OracleBackend{}, ignored, EvalConfig{}), std::invalid_argument);
}

TEST(EvaluateDataset, BackendErrorSurfaces) {
    std::vector<DatasetItem> data{labelled_item("a", 4, 4, std::vector<std::int32_t>(16, 0))};
    EXPECT_THROW(evaluate_dataset(FailingBackend{}, data, EvalConfig{}, 2), SessionError);
}
