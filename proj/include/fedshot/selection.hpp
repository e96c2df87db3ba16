#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fedshot/local_model.hpp"

namespace fedshot {

struct DistilledModel;

enum class Aggregation { MeanDecision, MeanSign };

// Server-side ensemble: an ordered list of member models whose prediction is
// the arithmetic mean of member decision values (or of their signs).
// Members are nonempty by construction and summed in fixed member order.
struct Ensemble {
  std::vector<const LocalModel*> members;
  Aggregation aggregation = Aggregation::MeanDecision;
};

// Minimum-sample eligibility filter: keeps SVM-backed models with
// n_train >= min_samples (inclusive), in input order. Constant classifiers
// are never shared.
std::vector<const LocalModel*> eligible(const std::vector<LocalModel>& models,
                                        std::size_t min_samples);

// Validation-AUC baseline, then the k best by validation AUC (descending),
// ties broken by ascending device_id. Models with undefined validation AUC
// never pass the baseline. Throws when nothing passes.
Ensemble select_cv(const std::vector<const LocalModel*>& candidates,
                   double baseline_auc, std::size_t k,
                   Aggregation aggregation = Aggregation::MeanDecision);

// Training-set-size baseline, then the k largest by n_train (descending),
// ties broken by ascending device_id. Throws when nothing passes.
Ensemble select_data(const std::vector<const LocalModel*>& candidates,
                     std::size_t baseline_n, std::size_t k,
                     Aggregation aggregation = Aggregation::MeanDecision);

// Uniform sample of min(k, count) models without replacement:
// Fisher-Yates order on the ascending-device_id list, seed-deterministic.
// Throws on an empty candidate list.
Ensemble select_random(const std::vector<const LocalModel*>& candidates,
                       std::size_t k, std::uint64_t seed,
                       Aggregation aggregation = Aggregation::MeanDecision);

// All candidates, ascending device_id. Throws on an empty candidate list.
Ensemble select_full(const std::vector<const LocalModel*>& candidates,
                     Aggregation aggregation = Aggregation::MeanDecision);

double ensemble_predict(const Ensemble& ensemble, std::span<const double> x);

struct CommCost {
  std::uint64_t up_bytes = 0;    // sum of serialized member record sizes
  std::uint64_t down_bytes = 0;  // serialized ensemble (or distilled model)
  std::size_t up_models = 0;
  std::size_t down_models = 0;
};

// Device->server cost is the members' serialized records; server->device
// cost is the ensemble envelope, or the distilled model when one is given.
CommCost comm_cost(const Ensemble& ensemble,
                   const DistilledModel* distilled = nullptr);

// Envelope record: aggregation mode plus the member model records.
std::string serialize_ensemble(const Ensemble& ensemble);

std::string aggregation_name(Aggregation aggregation);
Aggregation aggregation_from_name(const std::string& name);

}  // namespace fedshot
