#pragma once

#include <string>

#include "fedshot/experiment.hpp"

namespace fedshot {

// Writes report.json (full structured report), summary.csv (one row per
// method), device_scores.csv (method, device_id, auc) and distill_curve.csv
// (l, teacher_auc, distilled_auc) into out_dir, creating it if needed.
// CSV floats use 17 significant digits; the JSON is schema-versioned.
void emit_report(const ExperimentReport& report, const std::string& out_dir);

std::string report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const std::string& text);

}  // namespace fedshot
