#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hsiseg/backend.hpp"
#include "hsiseg/error.hpp"
#include "hsiseg/imgproc.hpp"
#include "hsiseg/metrics.hpp"

namespace hsiseg {

/// How DICE@Max searches thresholds. `grid_steps == 0` selects the exact
/// sorted sweep; otherwise tau ranges over {0, 1/n, ..., 1}.
struct ThresholdSweep {
    std::size_t grid_steps = 0;

    bool exact() const { return grid_steps == 0; }
};

struct EvalConfig {
    std::size_t max_clicks = 5;
    double threshold = 0.5;
    std::int32_t ignore_index = 255;
    ThresholdSweep sweep{};
    Connectivity connectivity = Connectivity::Four;
};

/// Throws std::invalid_argument for max_clicks == 0 or a threshold outside [0, 1].
void validate(const EvalConfig& config);

struct StepRecord {
    std::size_t step = 0;  // 1-based
    double dice_at_tau = 0.0;
    double dice_at_max = 0.0;
    double best_tau = 0.0;
    Pixel click{};  // most recent click when the prediction was made
};

/// Least-confident unclicked foreground pixel: argmin of `scores` over
/// F minus `clicks`, ties to the smallest row then column. Throws
/// std::invalid_argument when every foreground pixel has been clicked.
Pixel next_click(const ScoreMap& scores, const BinaryMask& foreground, const ClickSet& clicks);

/// DICE@Max using the configured sweep.
DiceAtMax dice_at_max(const ScoreMap& scores, const BinaryMask& gt, const BinaryMask& valid,
                      ThresholdSweep sweep);

/// Raised when the backend fails inside a session.
class SessionError : public Error {
  public:
    SessionError(std::size_t step, const std::string& message)
        : Error("step " + std::to_string(step) + ": " + message), step_(step) {}
    std::size_t step() const { return step_; }

  private:
    std::size_t step_;
};

/// Simulated user for one (image, class) pair. The first click is the centre
/// of the largest component of `foreground`; each later click is next_click on
/// the previous step's scores. If the foreground is exhausted before
/// `max_clicks`, the remaining steps reuse the full click set.
std::vector<StepRecord> simulate_session(const SegmentationBackend& backend,
                                         const HyperCube& cube, const PseudoRgb& rgb,
                                         const BinaryMask& foreground, const BinaryMask& valid,
                                         const EvalConfig& config);

struct DatasetItem {
    std::string id;
    HyperCube cube;
    LabelMap labels;
    PseudoRgb rgb;
};

struct TaskResult {
    std::string image_id;
    std::int32_t class_id = 0;
    std::vector<StepRecord> steps;
};

struct StepAggregate {
    std::size_t step = 0;
    double mean_dice_at_tau = 0.0;
    double mean_dice_at_max = 0.0;
};

struct EvalReport {
    std::string method;
    std::string dataset;
    EvalConfig config;
    std::vector<TaskResult> tasks;  // sorted by (image id, class id)
    std::vector<StepAggregate> per_step;

    std::size_t task_count() const { return tasks.size(); }
    /// Mean dice at tau for 1-based `clicks`, if that many steps were run.
    std::optional<double> dice_at_tau(std::size_t clicks) const;
    std::optional<double> dice_at_max(std::size_t clicks) const;
};

/// One session per (image, valid class present in the image). Sessions run on
/// up to `jobs` threads; the report does not depend on `jobs` or on the order
/// of `dataset`. Throws std::invalid_argument for an empty dataset, duplicate
/// image ids, or when no task remains after removing ignored classes.
EvalReport evaluate_dataset(const SegmentationBackend& backend,
                            std::span<const DatasetItem> dataset, const EvalConfig& config,
                            std::size_t jobs = 1, const std::string& dataset_name = "");

/// Step-wise means over tasks (tasks are summed in the given order).
std::vector<StepAggregate> aggregate(std::span<const TaskResult> tasks);

}  // namespace hsiseg
