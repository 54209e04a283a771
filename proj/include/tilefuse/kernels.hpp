#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <variant>

#include "tilefuse/csr.hpp"
#include "tilefuse/dense.hpp"
#include "tilefuse/scheduler.hpp"

namespace tilefuse {

/// D = A * (B * C) with sparse A and dense or sparse B.
template <class T>
struct FusedProblem {
  CsrMatrix<T> a;                                // n x n
  std::variant<DenseMatrix<T>, CsrMatrix<T>> b;  // n x b_cols
  DenseMatrix<T> c;                              // b_cols x c_cols

  bool b_is_dense() const {
    return std::holds_alternative<DenseMatrix<T>>(b);
  }
  index_t n() const { return a.n_rows; }
  index_t b_rows() const {
    return b_is_dense() ? std::get<DenseMatrix<T>>(b).n_rows
                        : std::get<CsrMatrix<T>>(b).n_rows;
  }
  index_t b_cols() const {
    return b_is_dense() ? std::get<DenseMatrix<T>>(b).n_cols
                        : std::get<CsrMatrix<T>>(b).n_cols;
  }
  index_t c_cols() const { return c.n_cols; }

  void check() const {
    if (!a.square())
      throw std::invalid_argument("problem: A must be square");
    if (b_rows() != a.n_cols)
      throw std::invalid_argument("problem: B must have n rows");
    if (c.n_rows != b_cols())
      throw std::invalid_argument("problem: C rows must match B cols");
  }
};

/// Row computations actually executed, for redundancy accounting.
struct RunStats {
  std::int64_t first_op_rows = 0;
  std::int64_t second_op_rows = 0;
  std::int64_t nnz_processed = 0;
};

namespace detail {

/// out = row i of B*C. The cCol loop stays innermost and accumulation
/// order is fixed, so results are bitwise stable across worker counts.
template <class T>
inline void gemm_row(const DenseMatrix<T>& b, const DenseMatrix<T>& c,
                     index_t i, T* out) {
  const index_t cc = c.n_cols;
  std::fill(out, out + cc, T{});
  const T* brow = b.row(i);
  for (index_t j = 0; j < b.n_cols; ++j) {
    const T bij = brow[j];
    const T* crow = c.row(j);
    for (index_t k = 0; k < cc; ++k) out[k] += bij * crow[k];
  }
}

/// out = row r of A*X for sparse A.
template <class T>
inline void spmm_row(const CsrMatrix<T>& a, const DenseMatrix<T>& x,
                     index_t r, T* out) {
  const index_t cc = x.n_cols;
  std::fill(out, out + cc, T{});
  for (index_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
    const T v = a.values[k];
    const T* xrow = x.row(a.col_idx[k]);
    for (index_t q = 0; q < cc; ++q) out[q] += v * xrow[q];
  }
}

inline void require_workers(int workers) {
  if (workers < 1)
    throw std::invalid_argument("workers must be >= 1");
}

/// Shared fused executor; first_row(i, out) computes row i of D1 = B*C.
template <class T, class FirstRow>
DenseMatrix<T> fused_run(const CsrMatrix<T>& a, index_t c_cols,
                         const FusedSchedule& sched, int workers,
                         FirstRow first_row, RunStats* stats) {
  require_workers(workers);
  if (sched.n != a.n_rows)
    throw std::invalid_argument("schedule and problem disagree on n");

  const index_t n = a.n_rows;
  DenseMatrix<T> d1(n, c_cols);
  DenseMatrix<T> d(n, c_cols);
  std::int64_t first_rows = 0;
  std::int64_t second_rows = 0;

  for (const auto& wave : sched.wavefronts) {
    if (wave.empty()) continue;  // no work, no barrier
    const auto num_tiles = static_cast<std::ptrdiff_t>(wave.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers) \
    reduction(+ : first_rows, second_rows)
    for (std::ptrdiff_t v = 0; v < num_tiles; ++v) {
      const FusedTile& tile = wave[static_cast<std::size_t>(v)];
      for (index_t i = tile.i_lo; i < tile.i_hi; ++i) {
        first_row(i, d1.row(i));
        ++first_rows;
      }
      for (const index_t j : tile.j_rows) {
        spmm_row(a, d1, j, d.row(j));
        ++second_rows;
      }
    }
    // The implicit barrier closing the parallel region is the wavefront
    // barrier.
  }
  if (stats) {
    stats->first_op_rows += first_rows;
    stats->second_op_rows += second_rows;
  }
  return d;
}

template <class T, class FirstRow>
DenseMatrix<T> unfused_run(const CsrMatrix<T>& a, index_t c_cols, int workers,
                           FirstRow first_row, RunStats* stats) {
  require_workers(workers);
  const index_t n = a.n_rows;
  DenseMatrix<T> d1(n, c_cols);
  DenseMatrix<T> d(n, c_cols);
  std::int64_t first_rows = 0;
  std::int64_t second_rows = 0;

#pragma omp parallel for schedule(static) num_threads(workers) \
    reduction(+ : first_rows)
  for (index_t i = 0; i < n; ++i) {
    first_row(i, d1.row(i));
    ++first_rows;
  }
#pragma omp parallel for schedule(static) num_threads(workers) \
    reduction(+ : second_rows)
  for (index_t j = 0; j < n; ++j) {
    spmm_row(a, d1, j, d.row(j));
    ++second_rows;
  }
  if (stats) {
    stats->first_op_rows += first_rows;
    stats->second_op_rows += second_rows;
  }
  return d;
}

}  // namespace detail

/// Rows [row_lo, row_hi) of D1 = B*C.
template <class T>
void gemm(const DenseMatrix<T>& b, const DenseMatrix<T>& c, index_t row_lo,
          index_t row_hi, DenseMatrix<T>& d1) {
  if (b.n_cols != c.n_rows)
    throw std::invalid_argument("gemm: inner dimensions disagree");
  if (d1.n_rows != b.n_rows || d1.n_cols != c.n_cols)
    throw std::invalid_argument("gemm: output shape mismatch");
  for (index_t i = row_lo; i < row_hi; ++i)
    detail::gemm_row(b, c, i, d1.row(i));
}

/// Rows j_list of D = A*X.
template <class T>
void spmm(const CsrMatrix<T>& a, const DenseMatrix<T>& x,
          std::span<const index_t> j_list, DenseMatrix<T>& d) {
  if (a.n_cols != x.n_rows)
    throw std::invalid_argument("spmm: inner dimensions disagree");
  if (d.n_rows != a.n_rows || d.n_cols != x.n_cols)
    throw std::invalid_argument("spmm: output shape mismatch");
  for (const index_t j : j_list) detail::spmm_row(a, x, j, d.row(j));
}

template <class T>
DenseMatrix<T> fused_gemm_spmm(const FusedProblem<T>& problem,
                               const FusedSchedule& sched, int workers,
                               RunStats* stats = nullptr) {
  problem.check();
  if (!problem.b_is_dense())
    throw std::invalid_argument("fused_gemm_spmm: B must be dense");
  const auto& b = std::get<DenseMatrix<T>>(problem.b);
  return detail::fused_run<T>(
      problem.a, problem.c_cols(), sched, workers,
      [&](index_t i, T* out) { detail::gemm_row(b, problem.c, i, out); },
      stats);
}

template <class T>
DenseMatrix<T> fused_spmm_spmm(const FusedProblem<T>& problem,
                               const FusedSchedule& sched, int workers,
                               RunStats* stats = nullptr) {
  problem.check();
  if (problem.b_is_dense())
    throw std::invalid_argument("fused_spmm_spmm: B must be sparse");
  const auto& b = std::get<CsrMatrix<T>>(problem.b);
  return detail::fused_run<T>(
      problem.a, problem.c_cols(), sched, workers,
      [&](index_t i, T* out) { detail::spmm_row(b, problem.c, i, out); },
      stats);
}

/// All of D1, a barrier, then all of D; same inner loops as the fused
/// executors, rows statically chunked.
template <class T>
DenseMatrix<T> unfused_gemm_spmm(const FusedProblem<T>& problem, int workers,
                                 RunStats* stats = nullptr) {
  problem.check();
  if (!problem.b_is_dense())
    throw std::invalid_argument("unfused_gemm_spmm: B must be dense");
  const auto& b = std::get<DenseMatrix<T>>(problem.b);
  return detail::unfused_run<T>(
      problem.a, problem.c_cols(), workers,
      [&](index_t i, T* out) { detail::gemm_row(b, problem.c, i, out); },
      stats);
}

template <class T>
DenseMatrix<T> unfused_spmm_spmm(const FusedProblem<T>& problem, int workers,
                                 RunStats* stats = nullptr) {
  problem.check();
  if (problem.b_is_dense())
    throw std::invalid_argument("unfused_spmm_spmm: B must be sparse");
  const auto& b = std::get<CsrMatrix<T>>(problem.b);
  return detail::unfused_run<T>(
      problem.a, problem.c_cols(), workers,
      [&](index_t i, T* out) { detail::spmm_row(b, problem.c, i, out); },
      stats);
}

}  // namespace tilefuse
