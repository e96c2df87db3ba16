#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fedshot/data.hpp"
#include "fedshot/kernel.hpp"
#include "fedshot/matrix.hpp"

namespace fedshot {

// Dual kernel SVM for the regularized hinge-loss problem
//
//   min_w (1/n) sum_i max(0, 1 - y_i f(x_i)) + (lambda/2) ||w||^2
//
// trained to completion by exact dual coordinate maximization. The decision
// function is the representer sum
//
//   f(x) = (1 / (lambda * n)) * sum_i dual_coeffs[i] * k(x_i, x)
//
// with the box constraint 0 <= dual_coeffs[i] * labels[i] <= 1 kept exact
// after every coordinate update.
struct SvmModel {
  Points support_points;            // the device's training inputs
  std::vector<double> labels;       // in {-1, +1}
  std::vector<double> dual_coeffs;
  double lambda = 0.0;
  std::size_t n_train = 0;
  KernelParams kernel;

  // Solver outcome; not part of the serialized record.
  bool converged = false;
  std::size_t epochs = 0;
  double final_gap = std::numeric_limits<double>::infinity();

  double decision(std::span<const double> x) const;
};

// Fallback for data-deficient devices: a fixed decision value.
struct ConstantModel {
  double score = 0.0;
  double decision(std::span<const double>) const { return score; }
};

struct LocalModel {
  std::string device_id;
  std::variant<SvmModel, ConstantModel> body;
  std::size_t n_train = 0;
  // Undefined iff the device's validation split is empty or single-class.
  std::optional<double> validation_auc;

  bool is_svm() const { return std::holds_alternative<SvmModel>(body); }
  double decision(std::span<const double> x) const;
};

// Duality gap and dual objective at one epoch boundary. Exact coordinate
// maximization makes the dual objective non-decreasing epoch over epoch; the
// gap trends to zero but can jitter, since the primal term moves with the
// sweep order.
struct SolverEpoch {
  double gap = 0.0;
  double dual_objective = 0.0;
};

// Exact per-coordinate maximization of the hinge dual, sweeping coordinates
// in a seed-determined random permutation per epoch, stopping when the
// duality gap falls to tol or max_epochs is reached (reported through the
// converged flag). Identical inputs give bitwise-identical coefficients.
// trace, when given, receives one entry per epoch.
SvmModel train_svm(const LabeledSet& data, double lambda, KernelParams kernel,
                   double tol, std::size_t max_epochs, std::uint64_t seed,
                   std::vector<SolverEpoch>* trace = nullptr);

// Primal minus dual objective at the model's coefficients; the convergence
// certificate. Nonnegative (within rounding) for any feasible coefficients.
double duality_gap(const SvmModel& model, const LabeledSet& data);

// Constant classifier for data-deficient devices; score fixed at 0.0 so the
// tie convention makes its AUC exactly 0.5.
ConstantModel train_constant(const LabeledSet& data);

struct LocalTrainConfig {
  std::size_t min_samples = 30;
  double lambda = 0.0;  // <= 0: per-device default 1/n_train
  KernelParams kernel;
  double tol = 1e-6;
  std::size_t max_epochs = 1000;
  std::uint64_t seed = 0;
};

// Trains a device to completion: an SvmModel when the train split has at
// least min_samples samples and both classes, a ConstantModel otherwise.
// validation_auc is scored on the device's validation split.
LocalModel train_local(const DeviceDataset& device, const LocalTrainConfig& config);

// Versioned JSON record: kernel params, lambda, n_train, labels, dual
// coefficients and support points (row-major). Its byte size is the unit of
// communication accounting.
std::string serialize_model(const LocalModel& model);
LocalModel deserialize_model(const std::string& text);

}  // namespace fedshot
