#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fedshot/data.hpp"
#include "fedshot/local_model.hpp"

namespace fedshot {

// ROC-AUC: probability a uniformly random positive outscores a uniformly
// random negative, ties counted 1/2 (Mann-Whitney convention). Rank-based,
// O(n log n). Returns nullopt when either class is absent.
std::optional<double> auc(std::span<const double> scores,
                          std::span<const double> labels);

// O(n^2) explicit pairwise count: (wins + ties/2) / (P*N). Same contract as
// auc; kept as an independent cross-check.
std::optional<double> auc_bruteforce(std::span<const double> scores,
                                     std::span<const double> labels);

struct DeviceScorecard {
  std::string device_id;
  std::optional<double> auc;  // undefined iff the test split lacks both classes
  std::size_t n_test = 0;
};

struct SummaryMetrics {
  double mean_auc = 0.0;  // over defined AUCs only
  std::size_t evaluated_devices = 0;
  std::size_t skipped_devices = 0;
  std::map<int, double> percentiles;  // {5, 25, 50, 75, 95}
};

// Scores every device's test split with the given decision function.
// Devices are processed independently (worker pool safe); output order
// matches dataset order.
std::vector<DeviceScorecard> evaluate_per_device(
    const std::function<double(std::span<const double>)>& decision,
    const FederatedDataset& dataset, unsigned threads = 0);

// Local-baseline mode: device t's test split is scored by models[t], its own
// locally trained model. models must align with dataset.devices.
std::vector<DeviceScorecard> evaluate_local_baseline(
    std::span<const LocalModel> models, const FederatedDataset& dataset,
    unsigned threads = 0);

// Mean over defined AUCs plus percentiles by linear interpolation on the
// sorted values. Throws if no device has a defined AUC.
SummaryMetrics summarize(const std::vector<DeviceScorecard>& cards);

// (method - local) / local, on mean AUCs.
double relative_gain(const SummaryMetrics& method, const SummaryMetrics& local);

// method / ideal, on mean AUCs.
double fraction_of_ideal(const SummaryMetrics& method, const SummaryMetrics& ideal);

}  // namespace fedshot
