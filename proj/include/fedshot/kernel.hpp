#pragma once

#include <cstdint>
#include <span>

#include "fedshot/matrix.hpp"

namespace fedshot {

// RBF bandwidth, units 1/feature-distance^2. Must be positive.
struct KernelParams {
  double gamma = 1.0;
};

// k(x, y) = exp(-gamma * ||x - y||^2), in (0, 1].
// Squared distance is accumulated term by term rather than expanded into
// norms and a dot product, so near-identical points do not cancel.
double rbf(std::span<const double> x, std::span<const double> y,
           const KernelParams& params);

// Kernel matrix: entry (i, j) = rbf(X[i], Y[j]). Rows may be filled by
// worker threads; each entry has a fixed summation order, so the result is
// bitwise deterministic for a fixed input.
Matrix gram(const Points& X, const Points& Y, const KernelParams& params,
            unsigned threads = 0);

// Median heuristic: gamma = 1 / (2 * median^2) of pairwise Euclidean
// distances over a seeded subsample of at most `subsample` points.
// Falls back to 1.0 when the median distance is zero or there are fewer
// than two points.
double median_heuristic_gamma(const Points& pooled, std::uint64_t seed,
                              std::size_t subsample = 256);

}  // namespace fedshot
