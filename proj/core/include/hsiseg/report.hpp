#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hsiseg/eval.hpp"

namespace hsiseg::report {

/// Header row of the summary CSV.
inline constexpr const char* kCsvHeader =
    "method,dataset,dice@0.5_1c,dice@max_1c,dice@0.5_5c,n_tasks";

/// Full report: config, summary, per-step means and every task's step records.
/// Key order and number formatting are fixed, so equal reports serialize to
/// identical bytes.
std::string to_json(const EvalReport& report);

/// Summary table: header plus one row per report. Missing columns (fewer than
/// five clicks) are left empty.
std::string to_csv(const std::vector<const EvalReport*>& reports);
std::string to_csv(const EvalReport& report);

/// One human-readable summary row.
std::string summary_line(const EvalReport& report);

/// Writes `<prefix>.json` and `<prefix>.csv`.
void write(const EvalReport& report, const std::filesystem::path& prefix);

}  // namespace hsiseg::report
