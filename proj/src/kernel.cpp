#include "fedshot/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "fedshot/parallel.hpp"
#include "fedshot/rng.hpp"

namespace fedshot {

namespace {

double squared_distance(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double diff = x[i] - y[i];
    acc += diff * diff;
  }
  return acc;
}

void check_finite(std::span<const double> v, const char* side) {
  for (double c : v) {
    if (!std::isfinite(c)) {
      throw std::invalid_argument(std::string("rbf: non-finite coordinate in ") + side);
    }
  }
}

}  // namespace

double rbf(std::span<const double> x, std::span<const double> y,
           const KernelParams& params) {
  if (x.size() != y.size() || x.empty()) {
    throw std::invalid_argument("rbf: dimension mismatch");
  }
  if (!(params.gamma > 0.0)) {
    throw std::invalid_argument("rbf: gamma must be positive");
  }
  check_finite(x, "x");
  check_finite(y, "y");
  return std::exp(-params.gamma * squared_distance(x, y));
}

Matrix gram(const Points& X, const Points& Y, const KernelParams& params,
            unsigned threads) {
  if (X.dim != Y.dim) {
    throw std::invalid_argument("gram: dimension mismatch");
  }
  Matrix out(X.size(), Y.size());
  parallel_for(
      X.size(),
      [&](std::size_t i) {
        const auto xi = X.row(i);
        for (std::size_t j = 0; j < Y.size(); ++j) {
          out(i, j) = rbf(xi, Y.row(j), params);
        }
      },
      threads);
  return out;
}

double median_heuristic_gamma(const Points& pooled, std::uint64_t seed,
                              std::size_t subsample) {
  const std::size_t n = pooled.size();
  if (n < 2) return 1.0;

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(idx);
  const std::size_t m = std::min(n, subsample);

  std::vector<double> dists;
  dists.reserve(m * (m - 1) / 2);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      dists.push_back(std::sqrt(squared_distance(pooled.row(idx[a]), pooled.row(idx[b]))));
    }
  }
  std::sort(dists.begin(), dists.end());
  const std::size_t cnt = dists.size();
  const double median = (cnt % 2 == 1)
                            ? dists[cnt / 2]
                            : 0.5 * (dists[cnt / 2 - 1] + dists[cnt / 2]);
  if (!(median > 0.0)) return 1.0;
  return 1.0 / (2.0 * median * median);
}

}  // namespace fedshot
