#include "fedledger/nn/matrix.hpp"

#include <algorithm>

#include "fedledger/errors.hpp"

namespace fedledger::nn {

void Matrix::append_row(std::span<const double> values) {
  if (rows == 0 && cols == 0) cols = values.size();
  if (values.size() != cols) throw ShapeError("append_row: width mismatch");
  data.insert(data.end(), values.begin(), values.end());
  ++rows;
}

Matrix gather_rows(const Matrix& source, std::span<const std::size_t> indices) {
  Matrix out(indices.size(), source.cols);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= source.rows) throw ShapeError("gather_rows: index out of range");
    auto src = source.row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

Matrix vstack(const Matrix& top, const Matrix& bottom) {
  if (top.empty()) return bottom;
  if (bottom.empty()) return top;
  if (top.cols != bottom.cols) throw ShapeError("vstack: width mismatch");
  Matrix out;
  out.rows = top.rows + bottom.rows;
  out.cols = top.cols;
  out.data.reserve(top.data.size() + bottom.data.size());
  out.data.insert(out.data.end(), top.data.begin(), top.data.end());
  out.data.insert(out.data.end(), bottom.data.begin(), bottom.data.end());
  return out;
}

}  // namespace fedledger::nn
