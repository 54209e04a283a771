#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "tilefuse/csr.hpp"
#include "tilefuse/dense.hpp"
#include "tilefuse/generate.hpp"
#include "tilefuse/scheduler.hpp"

namespace tf_test {

using tilefuse::CsrMatrix;
using tilefuse::DenseMatrix;
using tilefuse::FusedSchedule;
using tilefuse::FusedTile;
using tilefuse::index_t;
using tilefuse::SchedulerConfig;
using tilefuse::SparsityView;
using tilefuse::Triplet;

inline CsrMatrix<double> make_identity(index_t n) {
  std::vector<Triplet<double>> t;
  for (index_t i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return tilefuse::csr_from_triplets(n, n, std::move(t));
}

inline CsrMatrix<double> make_full(index_t n, double value = 1.0) {
  std::vector<Triplet<double>> t;
  for (index_t i = 0; i < n; ++i)
    for (index_t j = 0; j < n; ++j) t.push_back({i, j, value});
  return tilefuse::csr_from_triplets(n, n, std::move(t));
}

/// Arrow pattern: dense first row plus dense first column plus diagonal.
inline CsrMatrix<double> make_arrow(index_t n) {
  std::vector<Triplet<double>> t;
  for (index_t j = 0; j < n; ++j) t.push_back({0, j, 1.0});
  for (index_t i = 1; i < n; ++i) {
    t.push_back({i, 0, 1.0});
    t.push_back({i, i, 2.0});
  }
  return tilefuse::csr_from_triplets(n, n, std::move(t));
}

/// Rectangular random sparse with every row nonempty (for B operands).
inline CsrMatrix<double> gen_rect_random(index_t rows, index_t cols,
                                         double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> val(0.1, 1.0);
  std::vector<Triplet<double>> t;
  for (index_t r = 0; r < rows; ++r) {
    bool any = false;
    for (index_t c = 0; c < cols; ++c)
      if (unit(rng) < density) {
        t.push_back({r, c, val(rng)});
        any = true;
      }
    if (!any) t.push_back({r, r % cols, val(rng)});
  }
  return tilefuse::csr_from_triplets(rows, cols, std::move(t));
}

template <class T>
DenseMatrix<T> random_dense(index_t rows, index_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  DenseMatrix<T> m(rows, cols);
  for (auto& x : m.data) x = static_cast<T>(val(rng));
  return m;
}

/// Per-row fused-tile index under uniform tiles of width t, or -1 when the
/// row's in-edges span tiles. Deliberately naive: checks every column.
inline std::vector<index_t> brute_force_fuse(const SparsityView& a,
                                             index_t t) {
  std::vector<index_t> tile_of(static_cast<std::size_t>(a.n_rows), -1);
  for (index_t j = 0; j < a.n_rows; ++j) {
    const auto cols = a.row_cols(j);
    if (cols.empty()) {
      tile_of[static_cast<std::size_t>(j)] = j / t;
      continue;
    }
    const index_t v = cols.front() / t;
    const index_t lo = v * t;
    const index_t hi = std::min<index_t>(lo + t, a.n_rows);
    bool inside = true;
    for (const index_t c : cols) inside = inside && c >= lo && c < hi;
    if (inside) tile_of[static_cast<std::size_t>(j)] = v;
  }
  return tile_of;
}

/// Independent loop order (i, k, j) for the oracle cross-check; per-element
/// accumulation still ascends in k, matching the library's rounding.
inline DenseMatrix<double> mul_ikj(const DenseMatrix<double>& x,
                                   const DenseMatrix<double>& y) {
  DenseMatrix<double> out(x.n_rows, y.n_cols);
  for (index_t i = 0; i < x.n_rows; ++i)
    for (index_t k = 0; k < x.n_cols; ++k) {
      const double xv = x.at(i, k);
      for (index_t j = 0; j < y.n_cols; ++j)
        out.at(i, j) += xv * y.at(k, j);
    }
  return out;
}

/// Set-based recomputation of the tile footprint, independent of the
/// scheduler's epoch-marking implementation.
inline double recompute_tile_cost(const SparsityView& a, const FusedTile& tile,
                                  const SchedulerConfig& cfg) {
  std::set<index_t> distinct;
  double nnz_j = 0.0;
  for (const index_t j : tile.j_rows)
    for (const index_t c : a.row_cols(j)) {
      distinct.insert(c);
      ++nnz_j;
    }
  const double uc = static_cast<double>(distinct.size());
  const double t = static_cast<double>(tile.i_hi - tile.i_lo);
  const double jc = static_cast<double>(tile.j_rows.size());
  if (cfg.b_is_dense) {
    const double first = cfg.whole_b_cost
                             ? static_cast<double>(a.n_rows)
                             : t;
    return (uc + t + jc) * cfg.c_cols + first * cfg.b_cols +
           std::ceil((nnz_j + jc + 1.0) * cfg.index_to_scalar_ratio);
  }
  double nnz_b = 0.0;
  for (index_t i = tile.i_lo; i < tile.i_hi; ++i)
    nnz_b += static_cast<double>(a.row_nnz(i));
  return (nnz_b + nnz_j + uc + t + jc) * cfg.c_cols +
         std::ceil((nnz_j + jc + 1.0 + nnz_b + t + 1.0) *
                   cfg.index_to_scalar_ratio);
}

inline std::vector<index_t> wavefront_rows(const FusedSchedule& s,
                                           std::size_t w) {
  std::vector<index_t> rows;
  for (const auto& tile : s.wavefronts.at(w))
    rows.insert(rows.end(), tile.j_rows.begin(), tile.j_rows.end());
  std::sort(rows.begin(), rows.end());
  return rows;
}

inline bool tiles_equal(const FusedTile& a, const FusedTile& b) {
  return a.i_lo == b.i_lo && a.i_hi == b.i_hi && a.j_rows == b.j_rows &&
         a.cost == b.cost;
}

inline bool schedules_equal(const FusedSchedule& a, const FusedSchedule& b) {
  if (a.n != b.n || a.tile_size != b.tile_size ||
      a.wavefronts.size() != b.wavefronts.size())
    return false;
  for (std::size_t w = 0; w < a.wavefronts.size(); ++w) {
    if (a.wavefronts[w].size() != b.wavefronts[w].size()) return false;
    for (std::size_t v = 0; v < a.wavefronts[w].size(); ++v)
      if (!tiles_equal(a.wavefronts[w][v], b.wavefronts[w][v])) return false;
  }
  return true;
}

}  // namespace tf_test
