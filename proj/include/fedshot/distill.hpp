#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fedshot/data.hpp"
#include "fedshot/kernel.hpp"
#include "fedshot/selection.hpp"

namespace fedshot {

// Unlabeled points available to the server for distillation.
struct ProxySet {
  Points points;
  std::string provenance;  // "validation-sample" or "external-file"
};

// Compact student model f'(x) = sum_j coeffs[j] * k(proxy_points[j], x).
struct DistilledModel {
  Points proxy_points;
  std::vector<double> coeffs;
  KernelParams kernel;
  double ridge = 0.0;
  // Fit diagnostic: targets - K * coeffs at the solution. Not serialized.
  std::vector<double> residual;

  double decision(std::span<const double> x) const;
};

// Uniform seed-deterministic sample without replacement of min(l, pool size)
// points from the union of all devices' validation splits; labels discarded.
ProxySet sample_proxy(const FederatedDataset& dataset, std::size_t l,
                      std::uint64_t seed);

// Teacher predictions on the proxy points, one per point.
std::vector<double> soft_labels(const Ensemble& ensemble, const ProxySet& proxy);

// Fits coeffs = argmin (1/l) ||targets - K a||^2 + ridge ||a||^2 with
// K = gram(proxy, proxy), via the normal equations
//   (K'K / l + ridge I) a = K' targets / l
// and a symmetric-positive-definite solve. ridge = 0 on a singular system
// fails with advice to set ridge > 0.
DistilledModel distill(const ProxySet& proxy, std::span<const double> targets,
                       KernelParams kernel, double ridge);

// Mean squared teacher/student prediction difference on the proxy points
// (the fit objective without the ridge term).
double distill_objective(const DistilledModel& model, const ProxySet& proxy,
                         std::span<const double> targets);

// Versioned JSON record: kernel params, ridge, coefficients and proxy points
// (row-major). Its byte size feeds the down-link communication accounting.
std::string serialize_distilled(const DistilledModel& model);

}  // namespace fedshot
