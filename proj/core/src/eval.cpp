#include "hsiseg/eval.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <set>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace hsiseg {

void validate(const EvalConfig& config) {
    if (config.max_clicks == 0) throw std::invalid_argument("max_clicks must be at least 1");
    if (!(config.threshold >= 0.0 && config.threshold <= 1.0)) {
        throw std::invalid_argument("threshold must lie in [0, 1]");
    }
}

Pixel next_click(const ScoreMap& scores, const BinaryMask& foreground, const ClickSet& clicks) {
    if (!scores.same_shape(foreground)) {
        throw std::invalid_argument("score map and foreground differ in size");
    }
    std::optional<Pixel> best;
    double best_score = 0.0;
    for (std::size_t r = 0; r < foreground.height(); ++r) {
        for (std::size_t c = 0; c < foreground.width(); ++c) {
            if (!foreground(r, c) || clicks.contains({r, c})) continue;
            if (!best || scores(r, c) < best_score) {
                best = Pixel{r, c};
                best_score = scores(r, c);
            }
        }
    }
    if (!best) throw std::invalid_argument("every foreground pixel has already been clicked");
    return *best;
}

DiceAtMax dice_at_max(const ScoreMap& scores, const BinaryMask& gt, const BinaryMask& valid,
                      ThresholdSweep sweep) {
    if (sweep.exact()) return dice_at_max(scores, gt, valid);
    DiceAtMax best{-1.0, 0.0};
    for (std::size_t i = 0; i <= sweep.grid_steps; ++i) {
        const double tau = static_cast<double>(i) / static_cast<double>(sweep.grid_steps);
        const double d = dice(threshold_scores(scores, tau), gt, valid);
        if (d >= best.dice) best = {d, tau};
    }
    return best;
}

std::vector<StepRecord> simulate_session(const SegmentationBackend& backend,
                                         const HyperCube& cube, const PseudoRgb& rgb,
                                         const BinaryMask& foreground, const BinaryMask& valid,
                                         const EvalConfig& config) {
    validate(config);
    if (!foreground.same_shape(cube.height(), cube.width()) || !foreground.same_shape(valid)) {
        throw std::invalid_argument("foreground / valid masks do not match the cube");
    }
    BinaryMask seed_region(foreground.height(), foreground.width());
    for (std::size_t i = 0; i < seed_region.size(); ++i) {
        seed_region.values()[i] = foreground.values()[i] && valid.values()[i];
    }

    ClickSet clicks;
    clicks.add(largest_component_center(seed_region, config.connectivity));

    std::size_t fg_count = 0;
    for (auto v : seed_region) fg_count += v ? 1 : 0;

    std::vector<StepRecord> out;
    for (std::size_t step = 1; step <= config.max_clicks; ++step) {
        ScoreMap scores;
        try {
            scores = backend.segment(cube, rgb, clicks);
        } catch (const std::exception& e) {
            throw SessionError(step, backend.name() + ": " + e.what());
        }
        if (scores.height() != cube.height() || scores.width() != cube.width()) {
            throw SessionError(step, backend.name() + " returned a map of the wrong size");
        }

        const DiceAtMax best = dice_at_max(scores, foreground, valid, config.sweep);
        out.push_back({step, dice(threshold_scores(scores, config.threshold), foreground, valid),
                       best.dice, best.best_tau, clicks.back()});

        if (step < config.max_clicks && clicks.size() < fg_count) {
            clicks.add(next_click(scores, seed_region, clicks));
        }
    }
    return out;
}

std::optional<double> EvalReport::dice_at_tau(std::size_t clicks) const {
    if (clicks == 0 || clicks > per_step.size()) return std::nullopt;
    return per_step[clicks - 1].mean_dice_at_tau;
}

std::optional<double> EvalReport::dice_at_max(std::size_t clicks) const {
    if (clicks == 0 || clicks > per_step.size()) return std::nullopt;
    return per_step[clicks - 1].mean_dice_at_max;
}

std::vector<StepAggregate> aggregate(std::span<const TaskResult> tasks) {
    std::vector<StepAggregate> out;
    if (tasks.empty()) return out;
    const std::size_t steps = tasks.front().steps.size();
    for (std::size_t k = 0; k < steps; ++k) {
        double sum_tau = 0.0, sum_max = 0.0;
        for (const auto& t : tasks) {
            sum_tau += t.steps.at(k).dice_at_tau;
            sum_max += t.steps.at(k).dice_at_max;
        }
        const auto n = static_cast<double>(tasks.size());
        out.push_back({k + 1, sum_tau / n, sum_max / n});
    }
    return out;
}

EvalReport evaluate_dataset(const SegmentationBackend& backend,
                            std::span<const DatasetItem> dataset, const EvalConfig& config,
                            std::size_t jobs, const std::string& dataset_name) {
    validate(config);
    if (dataset.empty()) throw std::invalid_argument("dataset is empty");

    struct Task {
        const DatasetItem* item;
        std::int32_t cls;
    };
    std::vector<Task> tasks;
    std::set<std::string> ids;
    for (const auto& item : dataset) {
        if (!ids.insert(item.id).second) {
            throw std::invalid_argument("duplicate image id '" + item.id + "'");
        }
        validate_pair(item.cube, item.labels);
        std::set<std::int32_t> classes;
        for (auto v : item.labels.grid()) {
            if (v != config.ignore_index) classes.insert(v);
        }
        for (auto cls : classes) tasks.push_back({&item, cls});
    }
    if (tasks.empty()) throw std::invalid_argument("every class in the dataset is ignored");
    std::sort(tasks.begin(), tasks.end(), [](const Task& a, const Task& b) {
        return std::tie(a.item->id, a.cls) < std::tie(b.item->id, b.cls);
    });

    std::vector<TaskResult> results(tasks.size());
    std::vector<std::exception_ptr> errors(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            const Task& task = tasks[i];
            try {
                const auto& labels = task.item->labels.grid();
                BinaryMask fg(labels.height(), labels.width());
                BinaryMask valid(labels.height(), labels.width());
                for (std::size_t p = 0; p < labels.size(); ++p) {
                    fg.values()[p] = labels.values()[p] == task.cls;
                    valid.values()[p] = labels.values()[p] != config.ignore_index;
                }
                results[i] = {task.item->id, task.cls,
                              simulate_session(backend, task.item->cube, task.item->rgb, fg, valid,
                                               config)};
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    const std::size_t threads = std::clamp<std::size_t>(jobs, 1, tasks.size());
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    EvalReport report;
    report.method = backend.name();
    report.dataset = dataset_name;
    report.config = config;
    report.tasks = std::move(results);
    report.per_step = aggregate(report.tasks);
    return report;
}

}  // namespace hsiseg
