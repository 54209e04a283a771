#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tilefuse {

using index_t = std::int32_t;

/// Compressed sparse row matrix. Column indices are strictly increasing
/// within each row and carry no duplicates. For the scheduler this also
/// serves as the iteration-dependence graph of D = A(BC): the in-edges of
/// second-operation iteration j are the column indices of row j.
template <class T>
struct CsrMatrix {
  index_t n_rows = 0;
  index_t n_cols = 0;
  std::vector<index_t> row_ptr;  // n_rows + 1 offsets
  std::vector<index_t> col_idx;  // nnz entries
  std::vector<T> values;         // nnz entries

  index_t nnz() const { return row_ptr.empty() ? 0 : row_ptr[n_rows]; }
  index_t row_nnz(index_t r) const { return row_ptr[r + 1] - row_ptr[r]; }
  bool square() const { return n_rows == n_cols; }

  std::span<const index_t> row_cols(index_t r) const {
    return {col_idx.data() + row_ptr[r],
            static_cast<std::size_t>(row_nnz(r))};
  }

  void validate() const {
    if (n_rows < 0 || n_cols < 0)
      throw std::invalid_argument("csr: negative dimension");
    if (row_ptr.size() != static_cast<std::size_t>(n_rows) + 1)
      throw std::invalid_argument("csr: row_ptr length != n_rows + 1");
    if (row_ptr.front() != 0)
      throw std::invalid_argument("csr: row_ptr[0] != 0");
    for (index_t r = 0; r < n_rows; ++r)
      if (row_ptr[r + 1] < row_ptr[r])
        throw std::invalid_argument("csr: row_ptr not non-decreasing at row " +
                                    std::to_string(r));
    const auto nz = static_cast<std::size_t>(row_ptr[n_rows]);
    if (col_idx.size() != nz || values.size() != nz)
      throw std::invalid_argument("csr: col_idx/values length != nnz");
    for (index_t r = 0; r < n_rows; ++r) {
      for (index_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
        if (col_idx[k] < 0 || col_idx[k] >= n_cols)
          throw std::invalid_argument("csr: column out of range in row " +
                                      std::to_string(r));
        if (k > row_ptr[r] && col_idx[k] <= col_idx[k - 1])
          throw std::invalid_argument(
              "csr: columns not strictly increasing in row " +
              std::to_string(r));
      }
    }
  }

  /// Checked constructor: validates every CSR invariant before handing the
  /// matrix out.
  static CsrMatrix checked(index_t rows, index_t cols,
                           std::vector<index_t> ptr, std::vector<index_t> idx,
                           std::vector<T> vals) {
    CsrMatrix m{rows, cols, std::move(ptr), std::move(idx), std::move(vals)};
    m.validate();
    return m;
  }
};

template <class T>
struct Triplet {
  index_t row = 0;
  index_t col = 0;
  T value{};
};

/// Builds a CSR matrix from unordered coordinate entries. Duplicate
/// coordinates are summed.
template <class T>
CsrMatrix<T> csr_from_triplets(index_t n_rows, index_t n_cols,
                               std::vector<Triplet<T>> entries) {
  for (const auto& e : entries)
    if (e.row < 0 || e.row >= n_rows || e.col < 0 || e.col >= n_cols)
      throw std::invalid_argument("csr_from_triplets: entry out of range");
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  CsrMatrix<T> m;
  m.n_rows = n_rows;
  m.n_cols = n_cols;
  m.row_ptr.assign(static_cast<std::size_t>(n_rows) + 1, 0);
  m.col_idx.reserve(entries.size());
  m.values.reserve(entries.size());
  for (std::size_t k = 0; k < entries.size();) {
    const index_t r = entries[k].row;
    const index_t c = entries[k].col;
    T sum{};
    while (k < entries.size() && entries[k].row == r && entries[k].col == c)
      sum += entries[k++].value;
    m.col_idx.push_back(c);
    m.values.push_back(sum);
    m.row_ptr[static_cast<std::size_t>(r) + 1]++;
  }
  if (m.col_idx.size() >
      static_cast<std::size_t>(std::numeric_limits<index_t>::max()))
    throw std::invalid_argument("csr_from_triplets: nnz exceeds index range");
  for (index_t r = 0; r < n_rows; ++r) m.row_ptr[r + 1] += m.row_ptr[r];
  m.validate();
  return m;
}

/// Non-owning pattern-only view; all the scheduler needs.
struct SparsityView {
  index_t n_rows = 0;
  index_t n_cols = 0;
  std::span<const index_t> row_ptr;
  std::span<const index_t> col_idx;

  SparsityView() = default;
  SparsityView(index_t rows, index_t cols, std::span<const index_t> ptr,
               std::span<const index_t> idx)
      : n_rows(rows), n_cols(cols), row_ptr(ptr), col_idx(idx) {}
  template <class T>
  SparsityView(const CsrMatrix<T>& m)  // NOLINT: implicit by design
      : n_rows(m.n_rows), n_cols(m.n_cols), row_ptr(m.row_ptr),
        col_idx(m.col_idx) {}

  index_t nnz() const { return row_ptr.empty() ? 0 : row_ptr[n_rows]; }
  index_t row_nnz(index_t r) const { return row_ptr[r + 1] - row_ptr[r]; }
  bool square() const { return n_rows == n_cols; }
  std::span<const index_t> row_cols(index_t r) const {
    return col_idx.subspan(static_cast<std::size_t>(row_ptr[r]),
                           static_cast<std::size_t>(row_nnz(r)));
  }
};

}  // namespace tilefuse
