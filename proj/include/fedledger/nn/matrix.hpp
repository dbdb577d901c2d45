#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fedledger::nn {

// Dense row-major matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  bool empty() const { return rows == 0; }

  void append_row(std::span<const double> values);

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

// Rows of `source` picked by index, in the given order.
Matrix gather_rows(const Matrix& source, std::span<const std::size_t> indices);

// Vertical concatenation; both operands must have the same width.
Matrix vstack(const Matrix& top, const Matrix& bottom);

}  // namespace fedledger::nn
