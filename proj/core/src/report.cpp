#include "hsiseg/report.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hsiseg::report {
namespace {

using nlohmann::ordered_json;

ordered_json optional_number(std::optional<double> v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::string csv_number(std::optional<double> v) {
    if (!v) return "";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, *v);
    return std::string(buf, ptr);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

}  // namespace

std::string to_json(const EvalReport& report) {
    ordered_json doc;
    doc["method"] = report.method;
    doc["dataset"] = report.dataset;
    doc["config"] = {
        {"max_clicks", report.config.max_clicks},
        {"threshold", report.config.threshold},
        {"ignore_index", report.config.ignore_index},
        {"threshold_sweep",
         report.config.sweep.exact() ? std::string("exact")
                                     : "grid:" + std::to_string(report.config.sweep.grid_steps)},
        {"connectivity", static_cast<int>(report.config.connectivity)},
    };
    doc["n_tasks"] = report.task_count();
    doc["summary"] = {
        {"dice@0.5_1c", optional_number(report.dice_at_tau(1))},
        {"dice@max_1c", optional_number(report.dice_at_max(1))},
        {"dice@0.5_5c", optional_number(report.dice_at_tau(5))},
    };

    ordered_json steps = ordered_json::array();
    for (const auto& s : report.per_step) {
        steps.push_back({{"step", s.step},
                         {"mean_dice_at_tau", s.mean_dice_at_tau},
                         {"mean_dice_at_max", s.mean_dice_at_max}});
    }
    doc["per_step"] = std::move(steps);

    ordered_json tasks = ordered_json::array();
    for (const auto& t : report.tasks) {
        ordered_json records = ordered_json::array();
        for (const auto& r : t.steps) {
            records.push_back({{"step", r.step},
                               {"dice_at_tau", r.dice_at_tau},
                               {"dice_at_max", r.dice_at_max},
                               {"best_tau", r.best_tau},
                               {"click", {r.click.row, r.click.col}}});
        }
        tasks.push_back({{"image", t.image_id}, {"class", t.class_id}, {"steps", std::move(records)}});
    }
    doc["tasks"] = std::move(tasks);
    return doc.dump(2) + "\n";
}

std::string to_csv(const std::vector<const EvalReport*>& reports) {
    std::ostringstream out;
    out << kCsvHeader << "\n";
    for (const auto* r : reports) {
        out << csv_field(r->method) << ',' << csv_field(r->dataset) << ','
            << csv_number(r->dice_at_tau(1)) << ',' << csv_number(r->dice_at_max(1)) << ','
            << csv_number(r->dice_at_tau(5)) << ',' << r->task_count() << "\n";
    }
    return out.str();
}

std::string to_csv(const EvalReport& report) { return to_csv(std::vector{&report}); }

std::string summary_line(const EvalReport& report) {
    auto fmt = [](std::optional<double> v) {
        if (!v) return std::string("   n/a ");
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.5f", *v);
        return std::string(buf);
    };
    std::ostringstream out;
    out << report.method << "  DICE@" << report.config.threshold
        << " (1c) " << fmt(report.dice_at_tau(1)) << "  DICE@Max (1c) "
        << fmt(report.dice_at_max(1)) << "  DICE@" << report.config.threshold << " (5c) "
        << fmt(report.dice_at_tau(5)) << "  tasks " << report.task_count();
    return out.str();
}

void write(const EvalReport& report, const std::filesystem::path& prefix) {
    auto json_path = prefix;
    json_path += ".json";
    auto csv_path = prefix;
    csv_path += ".csv";
    if (prefix.has_parent_path()) std::filesystem::create_directories(prefix.parent_path());
    std::ofstream(json_path, std::ios::trunc) << to_json(report);
    std::ofstream(csv_path, std::ios::trunc) << to_csv(report);
    if (!std::filesystem::exists(json_path) || !std::filesystem::exists(csv_path)) {
        throw Error("failed to write report " + prefix.string());
    }
}

}  // namespace hsiseg::report
