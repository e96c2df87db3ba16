#include "fedshot/local_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "fedshot/metrics.hpp"
#include "fedshot/rng.hpp"

namespace fedshot {

namespace {

// Primal minus dual objective from a precomputed Gram matrix.
//   P(alpha) = (1/n) sum_i hinge(y_i f_i) + (1/(2 lambda n^2)) a'Ka
//   D(alpha) = -(1/(2 lambda n^2)) a'Ka + (1/n) sum_i a_i y_i
SolverEpoch gap_from_gram(const Matrix& K, const std::vector<double>& alpha,
                          const std::vector<double>& y, double lambda,
                          std::vector<double>* ka_out = nullptr) {
  const std::size_t n = y.size();
  std::vector<double> ka(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = K.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += row[j] * alpha[j];
    ka[i] = acc;
  }
  const double inv_ln = 1.0 / (lambda * static_cast<double>(n));
  double quad = 0.0, hinge_sum = 0.0, lin = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    quad += alpha[i] * ka[i];
    hinge_sum += std::max(0.0, 1.0 - y[i] * ka[i] * inv_ln);
    lin += alpha[i] * y[i];
  }
  const double nn = static_cast<double>(n);
  const double primal = hinge_sum / nn + quad / (2.0 * lambda * nn * nn);
  const double dual = -quad / (2.0 * lambda * nn * nn) + lin / nn;
  if (ka_out) *ka_out = std::move(ka);
  return {primal - dual, dual};
}

}  // namespace

double SvmModel::decision(std::span<const double> x) const {
  if (x.size() != support_points.dim) {
    throw std::invalid_argument("decision: dimension mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < n_train; ++i) {
    acc += dual_coeffs[i] * rbf(support_points.row(i), x, kernel);
  }
  return acc / (lambda * static_cast<double>(n_train));
}

double LocalModel::decision(std::span<const double> x) const {
  return std::visit([&](const auto& m) { return m.decision(x); }, body);
}

SvmModel train_svm(const LabeledSet& data, double lambda, KernelParams kernel,
                   double tol, std::size_t max_epochs, std::uint64_t seed,
                   std::vector<SolverEpoch>* trace) {
  const std::size_t n = data.size();
  if (n < 2) throw std::invalid_argument("train_svm: need at least 2 samples");
  if (!data.has_both_classes()) {
    throw std::invalid_argument("train_svm: single-class data");
  }
  if (!(lambda > 0.0)) throw std::invalid_argument("train_svm: lambda must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("train_svm: tol must be positive");
  if (max_epochs < 1) throw std::invalid_argument("train_svm: max_epochs must be >= 1");

  const Matrix K = gram(data.X, data.X, kernel);
  const double ln = lambda * static_cast<double>(n);

  SvmModel model;
  model.support_points = data.X;
  model.labels = data.y;
  model.dual_coeffs.assign(n, 0.0);
  model.lambda = lambda;
  model.n_train = n;
  model.kernel = kernel;

  auto& alpha = model.dual_coeffs;
  std::vector<double> ka(n, 0.0);  // K * alpha, kept incrementally
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);

  if (trace) trace->clear();

  for (std::size_t epoch = 0; epoch < max_epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t i : order) {
      const double yi = data.y[i];
      const double fi = ka[i] / ln;
      // Exact maximizer of the dual in coordinate i, projected to [0,1]
      // in beta = alpha_i * y_i.
      double beta = alpha[i] * yi + ln * (1.0 - yi * fi) / K(i, i);
      beta = std::clamp(beta, 0.0, 1.0);
      const double updated = yi * beta;
      const double delta = updated - alpha[i];
      if (delta != 0.0) {
        alpha[i] = updated;
        const auto row = K.row(i);
        for (std::size_t j = 0; j < n; ++j) ka[j] += row[j] * delta;
      }
    }
    // Gap check recomputes K*alpha from scratch, which also resets the
    // incremental vector's accumulated rounding.
    const SolverEpoch state = gap_from_gram(K, alpha, data.y, lambda, &ka);
    model.final_gap = state.gap;
    model.epochs = epoch + 1;
    if (trace) trace->push_back(state);
    if (model.final_gap <= tol) {
      model.converged = true;
      break;
    }
  }
  return model;
}

double duality_gap(const SvmModel& model, const LabeledSet& data) {
  if (data.size() != model.n_train || data.X.dim != model.support_points.dim) {
    throw std::invalid_argument("duality_gap: model/data size mismatch");
  }
  const Matrix K = gram(data.X, data.X, model.kernel);
  return gap_from_gram(K, model.dual_coeffs, data.y, model.lambda).gap;
}

ConstantModel train_constant(const LabeledSet&) { return ConstantModel{0.0}; }

LocalModel train_local(const DeviceDataset& device, const LocalTrainConfig& config) {
  LocalModel out;
  out.device_id = device.device_id;
  out.n_train = device.train.size();

  const bool enough = out.n_train >= config.min_samples;
  if (enough && device.train.has_both_classes()) {
    const double lambda =
        config.lambda > 0.0 ? config.lambda : 1.0 / static_cast<double>(out.n_train);
    out.body = train_svm(device.train, lambda, config.kernel, config.tol,
                         config.max_epochs, config.seed);
  } else {
    out.body = train_constant(device.train);
  }

  if (device.validation.size() > 0) {
    std::vector<double> scores(device.validation.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
      scores[i] = out.decision(device.validation.X.row(i));
    }
    out.validation_auc = auc(scores, device.validation.y);
  }
  return out;
}

std::string serialize_model(const LocalModel& model) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["device_id"] = model.device_id;
  j["n_train"] = model.n_train;
  if (model.is_svm()) {
    const auto& svm = std::get<SvmModel>(model.body);
    j["type"] = "svm";
    j["kernel"] = {{"gamma", svm.kernel.gamma}};
    j["lambda"] = svm.lambda;
    j["dim"] = svm.support_points.dim;
    j["labels"] = svm.labels;
    j["dual_coeffs"] = svm.dual_coeffs;
    j["support_points"] = svm.support_points.data;  // row-major, n x dim
  } else {
    j["type"] = "constant";
    j["score"] = std::get<ConstantModel>(model.body).score;
  }
  return j.dump();
}

LocalModel deserialize_model(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (j.at("schema_version").get<int>() != 1) {
    throw std::runtime_error("model record: unsupported schema_version");
  }
  LocalModel model;
  model.device_id = j.at("device_id").get<std::string>();
  model.n_train = j.at("n_train").get<std::size_t>();
  const auto type = j.at("type").get<std::string>();
  if (type == "svm") {
    SvmModel svm;
    svm.kernel.gamma = j.at("kernel").at("gamma").get<double>();
    svm.lambda = j.at("lambda").get<double>();
    svm.support_points = Points(j.at("dim").get<std::size_t>());
    svm.support_points.data = j.at("support_points").get<std::vector<double>>();
    svm.labels = j.at("labels").get<std::vector<double>>();
    svm.dual_coeffs = j.at("dual_coeffs").get<std::vector<double>>();
    svm.n_train = model.n_train;
    model.body = std::move(svm);
  } else if (type == "constant") {
    model.body = ConstantModel{j.at("score").get<double>()};
  } else {
    throw std::runtime_error("model record: unknown type '" + type + "'");
  }
  return model;
}

}  // namespace fedshot
