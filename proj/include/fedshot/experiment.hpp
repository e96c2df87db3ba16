#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fedshot/config.hpp"
#include "fedshot/metrics.hpp"
#include "fedshot/selection.hpp"

namespace fedshot {

// Averaged communication figures; exact integers for deterministic policies,
// per-trial means for the random policy.
struct CommSummary {
  double up_bytes = 0.0;
  double down_bytes = 0.0;
  double up_models = 0.0;
  double down_models = 0.0;
};

// One evaluated method: a baseline ("local", "ideal") or a policy/k entry.
struct MethodResult {
  std::string name;    // e.g. "local", "ideal", "cv_k10", "full"
  std::string policy;  // "baseline", "CV", "Data", "Random", "Full"
  std::size_t k = 0;   // 0 where not applicable
  std::string error;   // nonempty when the policy failed (e.g. empty ensemble)

  SummaryMetrics summary;
  std::vector<DeviceScorecard> scorecards;
  CommSummary comm;
  std::optional<double> relative_gain;                  // of mean AUCs, vs local
  std::optional<double> relative_gain_mean_of_devices;  // mean of per-device gains
  std::optional<double> fraction_of_ideal;
  std::vector<SummaryMetrics> trial_summaries;  // Random policy only

  bool failed() const { return !error.empty(); }
};

struct DistillPoint {
  std::size_t l = 0;  // requested proxy size
  double teacher_mean_auc = 0.0;
  double distilled_mean_auc = 0.0;
  std::uint64_t distilled_bytes = 0;
  SummaryMetrics distilled_summary;
};

struct SolverStats {
  std::size_t svm_devices = 0;
  std::size_t constant_devices = 0;
  std::size_t converged = 0;
  double mean_epochs = 0.0;
  double max_final_gap = 0.0;
  bool ideal_converged = false;
  std::size_t ideal_epochs = 0;
};

struct ExperimentReport {
  int schema_version = 1;
  ExperimentConfig config;
  double gamma_resolved = 0.0;
  std::string dataset_name;
  std::size_t device_count = 0;
  std::size_t feature_dim = 0;

  std::vector<MethodResult> methods;  // "local", "ideal", then policy entries
  std::string best_method;            // highest mean AUC among policy entries

  std::string distill_teacher;  // concrete teacher ensemble, e.g. "data_k10"
  std::uint64_t teacher_down_bytes = 0;
  std::vector<DistillPoint> distill_curve;

  SolverStats solver;

  // Measured, not reproducible; reported on the console and kept out of the
  // emitted files so identical (config, seed) runs stay byte-identical.
  double wall_seconds = 0.0;

  const MethodResult* find_method(const std::string& name) const;
};

// Full one-shot pipeline: load or generate, split, train every device, both
// baselines, every configured policy over the k grid (random trials
// averaged), communication accounting, then a distillation sweep of the best
// ensemble over the proxy size grid. All RNG streams derive from
// config.seed by labeled hashing, so reports are reproducible bit for bit.
ExperimentReport run_experiment(const ExperimentConfig& config);

}  // namespace fedshot
