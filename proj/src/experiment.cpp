#include "fedshot/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "fedshot/distill.hpp"
#include "fedshot/error.hpp"
#include "fedshot/parallel.hpp"
#include "fedshot/rng.hpp"

namespace fedshot {

namespace {

struct CandidateEnsemble {
  std::string method_name;  // report entry this ensemble belongs to
  std::string label;        // teacher label, e.g. "data_k10" or "random_k10/trial2"
  Ensemble ensemble;
  double mean_auc = 0.0;
};

SummaryMetrics mean_of_summaries(const std::vector<SummaryMetrics>& parts) {
  SummaryMetrics out;
  out.evaluated_devices = parts.front().evaluated_devices;
  out.skipped_devices = parts.front().skipped_devices;
  for (const auto& s : parts) {
    out.mean_auc += s.mean_auc;
    for (const auto& [pct, v] : s.percentiles) out.percentiles[pct] += v;
  }
  const double inv = 1.0 / static_cast<double>(parts.size());
  out.mean_auc *= inv;
  for (auto& [pct, v] : out.percentiles) v *= inv;
  return out;
}

// Mean of per-device relative gains, over devices where both AUCs are
// defined and the local AUC is nonzero.
std::optional<double> per_device_gain(const std::vector<DeviceScorecard>& method,
                                      const std::vector<DeviceScorecard>& local) {
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < method.size() && i < local.size(); ++i) {
    if (method[i].auc && local[i].auc && *local[i].auc > 0.0) {
      acc += (*method[i].auc - *local[i].auc) / *local[i].auc;
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return acc / static_cast<double>(count);
}

CommSummary to_summary(const CommCost& cost) {
  return {static_cast<double>(cost.up_bytes), static_cast<double>(cost.down_bytes),
          static_cast<double>(cost.up_models), static_cast<double>(cost.down_models)};
}

}  // namespace

const MethodResult* ExperimentReport::find_method(const std::string& name) const {
  for (const auto& m : methods) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  const auto t_start = std::chrono::steady_clock::now();
  validate_config(config);

  ExperimentReport report;
  report.config = config;

  // 1. Load or generate, then split.
  RawFederatedData raw;
  if (config.dataset == "csv") {
    if (!std::filesystem::exists(config.csv_path)) {
      throw ConfigError("dataset file not found: " + config.csv_path);
    }
    raw = load_csv(config.csv_path);
  } else {
    SynthSpec spec;
    spec.devices = config.synth_devices;
    spec.dim = config.synth_dim;
    spec.n_min = config.synth_size_min;
    spec.n_max = config.synth_size_max;
    spec.heterogeneity = config.synth_heterogeneity;
    raw = synth_federated(spec, derive_seed(config.seed, "synth"));
  }
  const FederatedDataset dataset =
      split(raw, {config.split_train, config.split_test, config.split_validation},
            derive_seed(config.seed, "split"));
  report.dataset_name = dataset.name;
  report.device_count = dataset.devices.size();
  report.feature_dim = dataset.dim;

  // 2. Resolve the kernel bandwidth on pooled training data.
  const LabeledSet pooled =
      pool_train(dataset, config.ideal_pool_cap, derive_seed(config.seed, "pool"));
  KernelParams kernel;
  if (config.gamma == "median-heuristic") {
    kernel.gamma = median_heuristic_gamma(pooled.X, derive_seed(config.seed, "gamma"));
  } else {
    kernel.gamma = std::stod(config.gamma);
  }
  report.gamma_resolved = kernel.gamma;

  // 3. Train every device to completion (worker pool; per-device seeds).
  std::vector<LocalModel> locals(dataset.devices.size());
  parallel_for(
      dataset.devices.size(),
      [&](std::size_t t) {
        LocalTrainConfig tc;
        tc.min_samples = config.min_samples;
        tc.lambda = config.lambda;
        tc.kernel = kernel;
        tc.tol = config.tol;
        tc.max_epochs = config.max_epochs;
        tc.seed = derive_seed(config.seed, "train:" + dataset.devices[t].device_id);
        locals[t] = train_local(dataset.devices[t], tc);
      },
      config.threads);

  for (const auto& model : locals) {
    if (model.is_svm()) {
      const auto& svm = std::get<SvmModel>(model.body);
      ++report.solver.svm_devices;
      if (svm.converged) ++report.solver.converged;
      report.solver.mean_epochs += static_cast<double>(svm.epochs);
      report.solver.max_final_gap = std::max(report.solver.max_final_gap, svm.final_gap);
    } else {
      ++report.solver.constant_devices;
    }
  }
  if (report.solver.svm_devices > 0) {
    report.solver.mean_epochs /= static_cast<double>(report.solver.svm_devices);
  }

  // 4. Baselines: each device scored by its own model, and one model trained
  // on the pooled training data.
  MethodResult local_entry;
  local_entry.name = "local";
  local_entry.policy = "baseline";
  local_entry.scorecards = evaluate_local_baseline(locals, dataset, config.threads);
  local_entry.summary = summarize(local_entry.scorecards);

  MethodResult ideal_entry;
  ideal_entry.name = "ideal";
  ideal_entry.policy = "baseline";
  {
    const double lambda = config.lambda > 0.0
                              ? config.lambda
                              : 1.0 / static_cast<double>(pooled.size());
    SvmModel ideal = train_svm(pooled, lambda, kernel, config.tol, config.max_epochs,
                               derive_seed(config.seed, "ideal"));
    report.solver.ideal_converged = ideal.converged;
    report.solver.ideal_epochs = ideal.epochs;
    ideal_entry.scorecards = evaluate_per_device(
        [&](std::span<const double> x) { return ideal.decision(x); }, dataset,
        config.threads);
    ideal_entry.summary = summarize(ideal_entry.scorecards);
  }

  local_entry.relative_gain = 0.0;
  local_entry.relative_gain_mean_of_devices = 0.0;
  local_entry.fraction_of_ideal = fraction_of_ideal(local_entry.summary, ideal_entry.summary);
  ideal_entry.relative_gain = relative_gain(ideal_entry.summary, local_entry.summary);
  ideal_entry.relative_gain_mean_of_devices =
      per_device_gain(ideal_entry.scorecards, local_entry.scorecards);
  ideal_entry.fraction_of_ideal = 1.0;

  // 5. Policies over the k grid.
  const Aggregation agg = aggregation_from_name(config.aggregation);
  const auto candidates = eligible(locals, config.min_samples);
  std::vector<CandidateEnsemble> teachers;
  std::vector<MethodResult> policy_entries;

  const auto evaluate_ensemble = [&](const Ensemble& ensemble) {
    return evaluate_per_device(
        [&](std::span<const double> x) { return ensemble_predict(ensemble, x); },
        dataset, config.threads);
  };
  const auto finish_entry = [&](MethodResult& entry) {
    entry.relative_gain = relative_gain(entry.summary, local_entry.summary);
    entry.relative_gain_mean_of_devices =
        per_device_gain(entry.scorecards, local_entry.scorecards);
    entry.fraction_of_ideal = fraction_of_ideal(entry.summary, ideal_entry.summary);
  };

  for (const auto& policy : config.policies) {
    if (policy == "Full") {
      MethodResult entry;
      entry.name = "full";
      entry.policy = policy;
      try {
        Ensemble ensemble = select_full(candidates, agg);
        entry.scorecards = evaluate_ensemble(ensemble);
        entry.summary = summarize(entry.scorecards);
        entry.comm = to_summary(comm_cost(ensemble));
        finish_entry(entry);
        teachers.push_back({entry.name, entry.name, std::move(ensemble),
                            entry.summary.mean_auc});
      } catch (const std::exception& e) {
        entry.error = e.what();
      }
      policy_entries.push_back(std::move(entry));
      continue;
    }

    for (std::size_t k : config.k_grid) {
      MethodResult entry;
      entry.policy = policy;
      entry.k = k;
      if (policy == "CV") entry.name = "cv_k" + std::to_string(k);
      else if (policy == "Data") entry.name = "data_k" + std::to_string(k);
      else entry.name = "random_k" + std::to_string(k);

      try {
        if (policy == "Random") {
          std::vector<SummaryMetrics> trial_summaries;
          CommSummary comm_acc;
          for (std::size_t trial = 0; trial < config.random_trials; ++trial) {
            Ensemble ensemble = select_random(
                candidates, k,
                derive_seed(config.seed, "random:k" + std::to_string(k), trial), agg);
            auto cards = evaluate_ensemble(ensemble);
            auto summary = summarize(cards);
            const CommCost cost = comm_cost(ensemble);
            comm_acc.up_bytes += static_cast<double>(cost.up_bytes);
            comm_acc.down_bytes += static_cast<double>(cost.down_bytes);
            comm_acc.up_models += static_cast<double>(cost.up_models);
            comm_acc.down_models += static_cast<double>(cost.down_models);
            teachers.push_back({entry.name,
                                entry.name + "/trial" + std::to_string(trial),
                                std::move(ensemble), summary.mean_auc});
            if (trial == 0) entry.scorecards = std::move(cards);
            trial_summaries.push_back(std::move(summary));
          }
          const double inv = 1.0 / static_cast<double>(config.random_trials);
          entry.comm = {comm_acc.up_bytes * inv, comm_acc.down_bytes * inv,
                        comm_acc.up_models * inv, comm_acc.down_models * inv};
          entry.summary = mean_of_summaries(trial_summaries);
          entry.trial_summaries = std::move(trial_summaries);
          finish_entry(entry);
        } else {
          Ensemble ensemble =
              policy == "CV"
                  ? select_cv(candidates, config.cv_baseline_auc, k, agg)
                  : select_data(candidates, config.effective_data_baseline(), k, agg);
          entry.scorecards = evaluate_ensemble(ensemble);
          entry.summary = summarize(entry.scorecards);
          entry.comm = to_summary(comm_cost(ensemble));
          finish_entry(entry);
          teachers.push_back({entry.name, entry.name, std::move(ensemble),
                              entry.summary.mean_auc});
        }
      } catch (const std::exception& e) {
        entry.error = e.what();
      }
      policy_entries.push_back(std::move(entry));
    }
  }

  // Best method entry by mean AUC (ties keep the first in report order).
  const MethodResult* best = nullptr;
  for (const auto& entry : policy_entries) {
    if (entry.failed()) continue;
    if (best == nullptr || entry.summary.mean_auc > best->summary.mean_auc) {
      best = &entry;
    }
  }
  if (best != nullptr) report.best_method = best->name;

  // 6. Distill the best method's ensemble across the proxy-size grid. The
  // ranking metric is the reported per-entry mean AUC (trial-averaged for
  // the random policy); within a random entry the best trial becomes the
  // concrete teacher.
  const CandidateEnsemble* teacher = nullptr;
  for (const auto& candidate : teachers) {
    if (candidate.method_name != report.best_method) continue;
    if (teacher == nullptr || candidate.mean_auc > teacher->mean_auc) {
      teacher = &candidate;
    }
  }
  if (teacher != nullptr) {
    report.distill_teacher = teacher->label;
    report.teacher_down_bytes = comm_cost(teacher->ensemble).down_bytes;
    for (std::size_t l : config.proxy_sizes) {
      const ProxySet proxy =
          sample_proxy(dataset, l, derive_seed(config.seed, "proxy", l));
      const auto targets = soft_labels(teacher->ensemble, proxy);
      const DistilledModel student = distill(proxy, targets, kernel, config.ridge);

      DistillPoint point;
      point.l = l;
      point.teacher_mean_auc = teacher->mean_auc;
      auto cards = evaluate_per_device(
          [&](std::span<const double> x) { return student.decision(x); }, dataset,
          config.threads);
      point.distilled_summary = summarize(cards);
      point.distilled_mean_auc = point.distilled_summary.mean_auc;
      point.distilled_bytes = serialize_distilled(student).size();
      report.distill_curve.push_back(std::move(point));
    }
  }

  report.methods.reserve(2 + policy_entries.size());
  report.methods.push_back(std::move(local_entry));
  report.methods.push_back(std::move(ideal_entry));
  for (auto& entry : policy_entries) report.methods.push_back(std::move(entry));

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return report;
}

}  // namespace fedshot
