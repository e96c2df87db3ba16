#include "fedshot/distill.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "fedshot/rng.hpp"

namespace fedshot {

namespace {

// In-place Cholesky solve of A x = b for symmetric positive definite A.
// Returns false when a pivot is not strictly positive.
bool cholesky_solve(Matrix a, std::vector<double> b, std::vector<double>& x) {
  const std::size_t n = a.rows;
  for (std::size_t j = 0; j < n; ++j) {
    double pivot = a(j, j);
    for (std::size_t k = 0; k < j; ++k) pivot -= a(j, k) * a(j, k);
    if (!(pivot > 0.0) || !std::isfinite(pivot)) return false;
    const double ljj = std::sqrt(pivot);
    a(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = a(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= a(i, k) * a(j, k);
      a(i, j) = v / ljj;
    }
  }
  // Forward then backward substitution.
  for (std::size_t i = 0; i < n; ++i) {
    double v = b[i];
    for (std::size_t k = 0; k < i; ++k) v -= a(i, k) * b[k];
    b[i] = v / a(i, i);
  }
  x.assign(n, 0.0);
  for (std::size_t ri = n; ri-- > 0;) {
    double v = b[ri];
    for (std::size_t k = ri + 1; k < n; ++k) v -= a(k, ri) * x[k];
    x[ri] = v / a(ri, ri);
  }
  return true;
}

}  // namespace

double DistilledModel::decision(std::span<const double> x) const {
  if (x.size() != proxy_points.dim) {
    throw std::invalid_argument("distilled decision: dimension mismatch");
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < proxy_points.size(); ++j) {
    acc += coeffs[j] * rbf(proxy_points.row(j), x, kernel);
  }
  return acc;
}

ProxySet sample_proxy(const FederatedDataset& dataset, std::size_t l,
                      std::uint64_t seed) {
  if (l < 1) throw std::invalid_argument("sample_proxy: l must be >= 1");

  Points pool(dataset.dim);
  for (const auto& dev : dataset.devices) {
    pool.data.insert(pool.data.end(), dev.validation.X.data.begin(),
                     dev.validation.X.data.end());
  }
  if (pool.size() == 0) throw std::runtime_error("sample_proxy: empty validation pool");

  std::vector<std::size_t> idx(pool.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(idx);
  idx.resize(std::min(l, pool.size()));

  ProxySet out;
  out.provenance = "validation-sample";
  out.points = Points(dataset.dim);
  out.points.data.reserve(idx.size() * dataset.dim);
  for (std::size_t i : idx) out.points.push_back(pool.row(i));
  return out;
}

std::vector<double> soft_labels(const Ensemble& ensemble, const ProxySet& proxy) {
  std::vector<double> labels(proxy.points.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    labels[i] = ensemble_predict(ensemble, proxy.points.row(i));
  }
  return labels;
}

DistilledModel distill(const ProxySet& proxy, std::span<const double> targets,
                       KernelParams kernel, double ridge) {
  const std::size_t l = proxy.points.size();
  if (l < 1) throw std::invalid_argument("distill: empty proxy set");
  if (targets.size() != l) throw std::invalid_argument("distill: targets size mismatch");
  if (ridge < 0.0) throw std::invalid_argument("distill: ridge must be nonnegative");
  for (double t : targets) {
    if (!std::isfinite(t)) throw std::invalid_argument("distill: non-finite target");
  }

  const Matrix k = gram(proxy.points, proxy.points, kernel);

  // A = K'K/l + ridge*I, b = K't/l (K is symmetric).
  const double inv_l = 1.0 / static_cast<double>(l);
  Matrix a(l, l);
  for (std::size_t i = 0; i < l; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = 0.0;
      for (std::size_t m = 0; m < l; ++m) acc += k(m, i) * k(m, j);
      const double v = acc * inv_l + (i == j ? ridge : 0.0);
      a(i, j) = v;
      a(j, i) = v;
    }
  }
  std::vector<double> b(l, 0.0);
  for (std::size_t i = 0; i < l; ++i) {
    double acc = 0.0;
    for (std::size_t m = 0; m < l; ++m) acc += k(m, i) * targets[m];
    b[i] = acc * inv_l;
  }

  DistilledModel model;
  model.proxy_points = proxy.points;
  model.kernel = kernel;
  model.ridge = ridge;
  if (!cholesky_solve(std::move(a), std::move(b), model.coeffs)) {
    if (ridge == 0.0) {
      throw std::runtime_error(
          "distill: normal equations are singular; set ridge > 0");
    }
    throw std::runtime_error("distill: SPD solve failed");
  }
  for (double c : model.coeffs) {
    if (!std::isfinite(c)) throw std::runtime_error("distill: non-finite solution");
  }

  model.residual.resize(l);
  for (std::size_t i = 0; i < l; ++i) {
    double fit = 0.0;
    for (std::size_t j = 0; j < l; ++j) fit += k(i, j) * model.coeffs[j];
    model.residual[i] = targets[i] - fit;
  }
  return model;
}

double distill_objective(const DistilledModel& model, const ProxySet& proxy,
                         std::span<const double> targets) {
  const std::size_t l = proxy.points.size();
  if (targets.size() != l || model.coeffs.size() != model.proxy_points.size() ||
      proxy.points.dim != model.proxy_points.dim) {
    throw std::invalid_argument("distill_objective: dimension mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < l; ++i) {
    const double diff = targets[i] - model.decision(proxy.points.row(i));
    acc += diff * diff;
  }
  return acc / static_cast<double>(l);
}

std::string serialize_distilled(const DistilledModel& model) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["type"] = "distilled";
  j["kernel"] = {{"gamma", model.kernel.gamma}};
  j["ridge"] = model.ridge;
  j["dim"] = model.proxy_points.dim;
  j["coeffs"] = model.coeffs;
  j["proxy_points"] = model.proxy_points.data;  // row-major, l x dim
  return j.dump();
}

}  // namespace fedshot
