#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "tilefuse/csr.hpp"

namespace tilefuse {

/// Row-major dense matrix.
template <class T>
struct DenseMatrix {
  index_t n_rows = 0;
  index_t n_cols = 0;
  std::vector<T> data;  // n_rows * n_cols, row major

  DenseMatrix() = default;
  DenseMatrix(index_t rows, index_t cols)
      : n_rows(rows), n_cols(cols),
        data(static_cast<std::size_t>(rows) * cols, T{}) {
    if (rows < 0 || cols < 0)
      throw std::invalid_argument("dense: negative dimension");
  }

  T* row(index_t r) {
    return data.data() + static_cast<std::size_t>(r) * n_cols;
  }
  const T* row(index_t r) const {
    return data.data() + static_cast<std::size_t>(r) * n_cols;
  }
  T& at(index_t r, index_t c) { return row(r)[c]; }
  const T& at(index_t r, index_t c) const { return row(r)[c]; }

  bool same_shape(const DenseMatrix& other) const {
    return n_rows == other.n_rows && n_cols == other.n_cols;
  }
};

template <class T>
DenseMatrix<double> widen(const DenseMatrix<T>& m) {
  DenseMatrix<double> out(m.n_rows, m.n_cols);
  for (std::size_t k = 0; k < m.data.size(); ++k)
    out.data[k] = static_cast<double>(m.data[k]);
  return out;
}

template <class T>
DenseMatrix<double> csr_to_dense(const CsrMatrix<T>& m) {
  DenseMatrix<double> out(m.n_rows, m.n_cols);
  for (index_t r = 0; r < m.n_rows; ++r)
    for (index_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k)
      out.at(r, m.col_idx[k]) = static_cast<double>(m.values[k]);
  return out;
}

}  // namespace tilefuse
