#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "tilefuse/csr.hpp"
#include "tilefuse/dense.hpp"
#include "tilefuse/kernels.hpp"

namespace tilefuse {

/// Overlapped tiling: partitions own contiguous second-op row ranges and
/// replicate every first-op row they depend on, so all partitions run in a
/// single phase with zero synchronization.
struct OverlappedTile {
  index_t j_lo = 0;
  index_t j_hi = 0;
  std::vector<index_t> needed_i;  // sorted, deduplicated in-edges
};

struct OverlappedSchedule {
  index_t n = 0;
  std::vector<OverlappedTile> tiles;
  std::int64_t replicated = 0;     // total needed minus distinct needed
  std::int64_t total_needed = 0;   // first-op rows actually executed
};

/// Atomic tiling: first-op iterations are split into contiguous chunks and
/// every tile also applies the A-nonzeros whose columns fall in its chunk,
/// so one second-op row may be accumulated by several tiles.
struct AtomicSlice {
  index_t j = 0;       // second-op row
  index_t nz_lo = 0;   // sub-range of A's nonzero arrays
  index_t nz_hi = 0;
};

struct AtomicTile {
  index_t i_lo = 0;
  index_t i_hi = 0;
  std::vector<AtomicSlice> slices;
};

struct AtomicSchedule {
  index_t n = 0;
  // Tiles are self-contained (each slice's columns lie in its own i_range),
  // so a single wavefront suffices; the list shape mirrors FusedSchedule.
  std::vector<std::vector<AtomicTile>> wavefronts;
};

OverlappedSchedule build_overlapped(const SparsityView& a,
                                    int num_partitions);

AtomicSchedule build_atomic(const SparsityView& a, int num_tiles);

namespace detail {

template <class T, class FirstRow>
DenseMatrix<T> overlapped_run(const CsrMatrix<T>& a, index_t c_cols,
                              const OverlappedSchedule& sched, int workers,
                              FirstRow first_row, RunStats* stats) {
  require_workers(workers);
  if (sched.n != a.n_rows)
    throw std::invalid_argument("schedule and problem disagree on n");

  DenseMatrix<T> d(a.n_rows, c_cols);
  std::int64_t first_rows = 0;
  std::int64_t second_rows = 0;
  const auto num_tiles = static_cast<std::ptrdiff_t>(sched.tiles.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers) \
    reduction(+ : first_rows, second_rows)
  for (std::ptrdiff_t v = 0; v < num_tiles; ++v) {
    const OverlappedTile& tile = sched.tiles[static_cast<std::size_t>(v)];
    DenseMatrix<T> scratch(static_cast<index_t>(tile.needed_i.size()),
                           c_cols);
    for (std::size_t s = 0; s < tile.needed_i.size(); ++s) {
      first_row(tile.needed_i[s], scratch.row(static_cast<index_t>(s)));
      ++first_rows;
    }
    for (index_t j = tile.j_lo; j < tile.j_hi; ++j) {
      T* out = d.row(j);
      std::fill(out, out + c_cols, T{});
      for (index_t k = a.row_ptr[j]; k < a.row_ptr[j + 1]; ++k) {
        const auto it = std::lower_bound(tile.needed_i.begin(),
                                         tile.needed_i.end(), a.col_idx[k]);
        const auto slot =
            static_cast<index_t>(it - tile.needed_i.begin());
        const T v_a = a.values[k];
        const T* x = scratch.row(slot);
        for (index_t q = 0; q < c_cols; ++q) out[q] += v_a * x[q];
      }
      ++second_rows;
    }
  }
  if (stats) {
    stats->first_op_rows += first_rows;
    stats->second_op_rows += second_rows;
  }
  return d;
}

template <class T, class FirstRow>
DenseMatrix<T> atomic_run(const CsrMatrix<T>& a, index_t c_cols,
                          const AtomicSchedule& sched, int workers,
                          FirstRow first_row, RunStats* stats) {
  require_workers(workers);
  if (sched.n != a.n_rows)
    throw std::invalid_argument("schedule and problem disagree on n");

  const index_t n = a.n_rows;
  DenseMatrix<T> d1(n, c_cols);
  DenseMatrix<T> d(n, c_cols);  // zero-filled; tiles accumulate into it
  std::int64_t first_rows = 0;
  std::int64_t nnz_done = 0;

  for (const auto& wave : sched.wavefronts) {
    if (wave.empty()) continue;
    const auto num_tiles = static_cast<std::ptrdiff_t>(wave.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers) \
    reduction(+ : first_rows, nnz_done)
    for (std::ptrdiff_t v = 0; v < num_tiles; ++v) {
      const AtomicTile& tile = wave[static_cast<std::size_t>(v)];
      for (index_t i = tile.i_lo; i < tile.i_hi; ++i) {
        first_row(i, d1.row(i));
        ++first_rows;
      }
      for (const AtomicSlice& slice : tile.slices) {
        T* out = d.row(slice.j);
        for (index_t k = slice.nz_lo; k < slice.nz_hi; ++k) {
          const T v_a = a.values[k];
          const T* x = d1.row(a.col_idx[k]);
          for (index_t q = 0; q < c_cols; ++q) {
            const T contrib = v_a * x[q];
#pragma omp atomic
            out[q] += contrib;
          }
          ++nnz_done;
        }
      }
    }
  }
  if (stats) {
    stats->first_op_rows += first_rows;
    stats->nnz_processed += nnz_done;
  }
  return d;
}

}  // namespace detail

template <class T>
DenseMatrix<T> run_overlapped(const FusedProblem<T>& problem,
                              const OverlappedSchedule& sched, int workers,
                              RunStats* stats = nullptr) {
  problem.check();
  if (problem.b_is_dense()) {
    const auto& b = std::get<DenseMatrix<T>>(problem.b);
    return detail::overlapped_run<T>(
        problem.a, problem.c_cols(), sched, workers,
        [&](index_t i, T* out) { detail::gemm_row(b, problem.c, i, out); },
        stats);
  }
  const auto& b = std::get<CsrMatrix<T>>(problem.b);
  return detail::overlapped_run<T>(
      problem.a, problem.c_cols(), sched, workers,
      [&](index_t i, T* out) { detail::spmm_row(b, problem.c, i, out); },
      stats);
}

template <class T>
DenseMatrix<T> run_atomic(const FusedProblem<T>& problem,
                          const AtomicSchedule& sched, int workers,
                          RunStats* stats = nullptr) {
  problem.check();
  if (problem.b_is_dense()) {
    const auto& b = std::get<DenseMatrix<T>>(problem.b);
    return detail::atomic_run<T>(
        problem.a, problem.c_cols(), sched, workers,
        [&](index_t i, T* out) { detail::gemm_row(b, problem.c, i, out); },
        stats);
  }
  const auto& b = std::get<CsrMatrix<T>>(problem.b);
  return detail::atomic_run<T>(
      problem.a, problem.c_cols(), sched, workers,
      [&](index_t i, T* out) { detail::spmm_row(b, problem.c, i, out); },
      stats);
}

}  // namespace tilefuse
