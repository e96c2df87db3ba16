#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "fedshot/distill.hpp"
#include "fedshot/rng.hpp"
#include "oracles.hpp"

using namespace fedshot;

namespace {

ProxySet random_proxy(std::size_t l, std::size_t dim, std::uint64_t seed) {
  ProxySet proxy;
  proxy.provenance = "external-file";
  proxy.points = Points(dim);
  Rng rng(seed);
  for (std::size_t i = 0; i < l * dim; ++i) {
    proxy.points.data.push_back(rng.uniform(-1.0, 1.0));
  }
  return proxy;
}

std::vector<double> random_targets(std::size_t l, std::uint64_t seed) {
  std::vector<double> t(l);
  Rng rng(seed);
  for (auto& v : t) v = rng.normal();
  return t;
}

// Gradient of the ridge-regularized objective (1/l)||t - Ka||^2 + r||a||^2:
//   (2/l) K (Ka - t) + 2 r a
double grad_inf_norm(const DistilledModel& model, const ProxySet& proxy,
                     std::span<const double> targets) {
  const auto k = oracles::rbf_gram(proxy.points, model.kernel.gamma);
  const std::size_t l = targets.size();
  std::vector<double> ka(l, 0.0);
  for (std::size_t i = 0; i < l; ++i) {
    for (std::size_t j = 0; j < l; ++j) ka[i] += k(i, j) * model.coeffs[j];
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < l; ++i) {
    double g = 2.0 * model.ridge * model.coeffs[i];
    for (std::size_t j = 0; j < l; ++j) {
      g += (2.0 / static_cast<double>(l)) * k(i, j) * (ka[j] - targets[j]);
    }
    worst = std::max(worst, std::abs(g));
  }
  return worst;
}

}  // namespace

TEST_CASE("sample_proxy draws from the pooled validation splits") {
  const auto raw = synth_federated({5, 3, 20, 30, 0.5}, 81);
  const auto ds = split(raw, {0.5, 0.4, 0.1}, 82);

  std::size_t pool = 0;
  std::multiset<std::vector<double>> pool_rows;
  for (const auto& dev : ds.devices) {
    pool += dev.validation.size();
    for (std::size_t i = 0; i < dev.validation.size(); ++i) {
      const auto row = dev.validation.X.row(i);
      pool_rows.insert({row.begin(), row.end()});
    }
  }
  REQUIRE(pool >= 1);

  const auto everything = sample_proxy(ds, pool + 50, 83);
  CHECK(everything.points.size() == pool);
  CHECK(everything.provenance == "validation-sample");

  const auto a = sample_proxy(ds, 4, 84);
  const auto b = sample_proxy(ds, 4, 84);
  CHECK(a.points.data == b.points.data);

  for (std::size_t i = 0; i < a.points.size(); ++i) {
    const auto row = a.points.row(i);
    CHECK(pool_rows.count({row.begin(), row.end()}) > 0);
  }
}

TEST_CASE("sample_proxy fails on an empty validation pool") {
  FederatedDataset empty;
  empty.dim = 2;
  DeviceDataset dev;
  dev.device_id = "d";
  dev.dim = 2;
  dev.train.X = Points(2);
  dev.test.X = Points(2);
  dev.validation.X = Points(2);
  empty.devices.push_back(dev);
  CHECK_THROWS_WITH(sample_proxy(empty, 3, 1), doctest::Contains("empty validation pool"));
}

TEST_CASE("soft labels are the teacher's per-point predictions") {
  std::vector<LocalModel> members;
  for (double score : {0.7, -0.7}) {
    LocalModel m;
    m.device_id = score > 0 ? "p" : "n";
    m.n_train = 1;
    m.body = ConstantModel{score};
    members.push_back(std::move(m));
  }
  const auto proxy = random_proxy(6, 2, 85);

  const Ensemble solo{{&members[0]}, Aggregation::MeanDecision};
  const auto labels = soft_labels(solo, proxy);
  for (double v : labels) CHECK(v == 0.7);

  const Ensemble opposed{{&members[0], &members[1]}, Aggregation::MeanDecision};
  for (double v : soft_labels(opposed, proxy)) CHECK(v == 0.0);
}

TEST_CASE("single-point distillation is the scalar solve") {
  ProxySet proxy;
  proxy.points = Points(3);
  proxy.points.data = {0.25, -0.5, 1.0};
  const std::vector<double> target{0.625};
  const auto model = distill(proxy, target, {1.0}, 0.0);
  REQUIRE(model.coeffs.size() == 1);
  CHECK(model.coeffs[0] == doctest::Approx(0.625).epsilon(1e-14));
  CHECK(distill_objective(model, proxy, target) == doctest::Approx(0.0).epsilon(1e-20));
}

TEST_CASE("zero targets give the zero student") {
  const auto proxy = random_proxy(8, 3, 86);
  const std::vector<double> zeros(8, 0.0);
  const auto model = distill(proxy, zeros, {0.7}, 1e-6);
  for (double c : model.coeffs) CHECK(c == 0.0);
  const double x[3] = {0.1, 0.2, 0.3};
  CHECK(model.decision(x) == 0.0);
}

TEST_CASE("ridge-free distillation interpolates nonsingular systems") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto proxy = random_proxy(10, 5, 900 + seed);
    const auto targets = random_targets(10, 950 + seed);
    const auto model = distill(proxy, targets, {0.7}, 0.0);
    double t_inf = 0.0;
    for (double t : targets) t_inf = std::max(t_inf, std::abs(t));
    for (std::size_t i = 0; i < 10; ++i) {
      CHECK(std::abs(model.decision(proxy.points.row(i)) - targets[i]) <= 1e-6);
      CHECK(std::abs(model.residual[i]) <= 1e-6);
    }
    CHECK(grad_inf_norm(model, proxy, targets) <= 1e-8 * (1.0 + t_inf));
  }
}

TEST_CASE("perturbing the optimum increases the objective") {
  const auto proxy = random_proxy(10, 4, 87);
  const auto targets = random_targets(10, 88);
  const auto model = distill(proxy, targets, {0.8}, 0.0);
  const double at_optimum = distill_objective(model, proxy, targets);
  Rng rng(89);
  for (int rep = 0; rep < 100; ++rep) {
    auto perturbed = model;
    for (auto& c : perturbed.coeffs) c += 1e-3 * rng.normal();
    CHECK(distill_objective(perturbed, proxy, targets) >= at_optimum);
  }
}

TEST_CASE("distill objective plugs in the definition") {
  const auto proxy = random_proxy(6, 2, 90);
  const auto targets = random_targets(6, 91);
  DistilledModel zero;
  zero.proxy_points = proxy.points;
  zero.coeffs.assign(6, 0.0);
  zero.kernel = {1.0};
  double expected = 0.0;
  for (double t : targets) expected += t * t;
  expected /= 6.0;
  CHECK(distill_objective(zero, proxy, targets) ==
        doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("distillation is bitwise deterministic") {
  const auto proxy = random_proxy(12, 3, 92);
  const auto targets = random_targets(12, 93);
  const auto a = distill(proxy, targets, {0.9}, 1e-8);
  const auto b = distill(proxy, targets, {0.9}, 1e-8);
  CHECK(a.coeffs == b.coeffs);
}

TEST_CASE("singular ridge-free systems fail with advice") {
  ProxySet duplicated;
  duplicated.points = Points(2);
  duplicated.points.data = {0.5, 0.5, 0.5, 0.5};  // identical points
  const std::vector<double> targets{1.0, -1.0};
  CHECK_THROWS_WITH(distill(duplicated, targets, {1.0}, 0.0),
                    doctest::Contains("ridge"));
  // With a ridge the same system solves.
  const auto model = distill(duplicated, targets, {1.0}, 1e-6);
  CHECK(std::isfinite(model.coeffs[0]));
}

TEST_CASE("distill validates input") {
  const auto proxy = random_proxy(4, 2, 94);
  const std::vector<double> short_targets{1.0};
  CHECK_THROWS_AS(distill(proxy, short_targets, {1.0}, 0.0), std::invalid_argument);
  const std::vector<double> bad{1.0, std::nan(""), 0.0, 0.0};
  CHECK_THROWS_AS(distill(proxy, bad, {1.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(distill(proxy, random_targets(4, 95), {1.0}, -1.0),
                  std::invalid_argument);
}
