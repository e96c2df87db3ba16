#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fedshot {

// Sample-major point set: n rows of dimension dim, stored contiguously.
struct Points {
  std::size_t dim = 0;
  std::vector<double> data;

  Points() = default;
  explicit Points(std::size_t d) : dim(d) {}

  std::size_t size() const { return dim == 0 ? 0 : data.size() / dim; }

  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * dim, dim};
  }

  void push_back(std::span<const double> x) {
    data.insert(data.end(), x.begin(), x.end());
  }
};

// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * cols, cols};
  }
};

}  // namespace fedshot
