#include "fedshot/selection.hpp"

#include <algorithm>
#include <stdexcept>

#include <json.hpp>

#include "fedshot/distill.hpp"
#include "fedshot/error.hpp"
#include "fedshot/rng.hpp"

namespace fedshot {

namespace {

std::vector<const LocalModel*> by_ascending_id(std::vector<const LocalModel*> models) {
  std::sort(models.begin(), models.end(),
            [](const LocalModel* a, const LocalModel* b) {
              return a->device_id < b->device_id;
            });
  return models;
}

Ensemble take_top(std::vector<const LocalModel*> ranked, std::size_t k,
                  Aggregation aggregation, const char* policy) {
  if (ranked.empty()) {
    throw std::runtime_error(std::string(policy) + ": empty ensemble");
  }
  if (ranked.size() > k) ranked.resize(k);
  return Ensemble{std::move(ranked), aggregation};
}

}  // namespace

std::vector<const LocalModel*> eligible(const std::vector<LocalModel>& models,
                                        std::size_t min_samples) {
  std::vector<const LocalModel*> out;
  out.reserve(models.size());
  for (const auto& model : models) {
    if (model.is_svm() && model.n_train >= min_samples) out.push_back(&model);
  }
  return out;
}

Ensemble select_cv(const std::vector<const LocalModel*>& candidates,
                   double baseline_auc, std::size_t k, Aggregation aggregation) {
  if (k < 1) throw std::invalid_argument("select_cv: k must be >= 1");
  std::vector<const LocalModel*> passing;
  for (const auto* model : candidates) {
    if (model->validation_auc && *model->validation_auc >= baseline_auc) {
      passing.push_back(model);
    }
  }
  std::sort(passing.begin(), passing.end(),
            [](const LocalModel* a, const LocalModel* b) {
              if (*a->validation_auc != *b->validation_auc) {
                return *a->validation_auc > *b->validation_auc;
              }
              return a->device_id < b->device_id;
            });
  return take_top(std::move(passing), k, aggregation, "select_cv");
}

Ensemble select_data(const std::vector<const LocalModel*>& candidates,
                     std::size_t baseline_n, std::size_t k, Aggregation aggregation) {
  if (k < 1) throw std::invalid_argument("select_data: k must be >= 1");
  std::vector<const LocalModel*> passing;
  for (const auto* model : candidates) {
    if (model->n_train >= baseline_n) passing.push_back(model);
  }
  std::sort(passing.begin(), passing.end(),
            [](const LocalModel* a, const LocalModel* b) {
              if (a->n_train != b->n_train) return a->n_train > b->n_train;
              return a->device_id < b->device_id;
            });
  return take_top(std::move(passing), k, aggregation, "select_data");
}

Ensemble select_random(const std::vector<const LocalModel*>& candidates,
                       std::size_t k, std::uint64_t seed, Aggregation aggregation) {
  if (k < 1) throw std::invalid_argument("select_random: k must be >= 1");
  auto pool = by_ascending_id(candidates);
  Rng rng(seed);
  rng.shuffle(pool);
  return take_top(std::move(pool), k, aggregation, "select_random");
}

Ensemble select_full(const std::vector<const LocalModel*>& candidates,
                     Aggregation aggregation) {
  auto all = by_ascending_id(candidates);
  if (all.empty()) throw std::runtime_error("select_full: empty ensemble");
  return Ensemble{std::move(all), aggregation};
}

double ensemble_predict(const Ensemble& ensemble, std::span<const double> x) {
  double acc = 0.0;
  for (const auto* member : ensemble.members) {
    const double d = member->decision(x);
    if (ensemble.aggregation == Aggregation::MeanSign) {
      acc += (d > 0.0) ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
    } else {
      acc += d;
    }
  }
  return acc / static_cast<double>(ensemble.members.size());
}

CommCost comm_cost(const Ensemble& ensemble, const DistilledModel* distilled) {
  CommCost cost;
  for (const auto* member : ensemble.members) {
    cost.up_bytes += serialize_model(*member).size();
  }
  cost.up_models = ensemble.members.size();
  if (distilled != nullptr) {
    cost.down_bytes = serialize_distilled(*distilled).size();
    cost.down_models = 1;
  } else {
    cost.down_bytes = serialize_ensemble(ensemble).size();
    cost.down_models = ensemble.members.size();
  }
  return cost;
}

std::string serialize_ensemble(const Ensemble& ensemble) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["aggregation"] = aggregation_name(ensemble.aggregation);
  auto members = nlohmann::json::array();
  for (const auto* member : ensemble.members) {
    members.push_back(nlohmann::json::parse(serialize_model(*member)));
  }
  j["members"] = std::move(members);
  return j.dump();
}

std::string aggregation_name(Aggregation aggregation) {
  return aggregation == Aggregation::MeanSign ? "mean-sign" : "mean-decision";
}

Aggregation aggregation_from_name(const std::string& name) {
  if (name == "mean-decision") return Aggregation::MeanDecision;
  if (name == "mean-sign") return Aggregation::MeanSign;
  throw ConfigError("unknown aggregation '" + name + "'");
}

}  // namespace fedshot
