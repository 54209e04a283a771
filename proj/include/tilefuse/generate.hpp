#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "tilefuse/csr.hpp"

namespace tilefuse {

/// n x n matrix with each entry present independently with probability
/// `density`. Values are uniform in [0.1, 1.0]. A row that comes out empty
/// gets its diagonal entry inserted, so generated matrices have no empty
/// rows. Deterministic for a given (n, density, seed).
template <class T>
CsrMatrix<T> gen_random_sparse(index_t n, double density, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("gen_random_sparse: n must be >= 1");
  if (!(density > 0.0) || density > 1.0)
    throw std::invalid_argument("gen_random_sparse: density must be in (0,1]");

  std::mt19937_64 rng(seed);
  // 53-bit mantissa draws; uniform in (0,1) resp. [0,1).
  auto unit_open = [&rng] {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
  };
  auto value = [&rng] {
    return static_cast<T>(0.1 +
                          0.9 * static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };

  CsrMatrix<T> m;
  m.n_rows = m.n_cols = n;
  m.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
  const bool full = density >= 1.0;
  const double log_skip = full ? 0.0 : std::log1p(-density);
  for (index_t r = 0; r < n; ++r) {
    const auto row_start = m.col_idx.size();
    if (full) {
      for (index_t c = 0; c < n; ++c) {
        m.col_idx.push_back(c);
        m.values.push_back(value());
      }
    } else {
      // Geometric skipping, equivalent to a Bernoulli draw per column.
      std::int64_t c = -1;
      for (;;) {
        c += 1 + static_cast<std::int64_t>(
                     std::floor(std::log(unit_open()) / log_skip));
        if (c >= n) break;
        m.col_idx.push_back(static_cast<index_t>(c));
        m.values.push_back(value());
      }
    }
    if (m.col_idx.size() == row_start) {
      // Keep rows nonempty: fall back to the diagonal.
      m.col_idx.push_back(r);
      m.values.push_back(value());
    }
    m.row_ptr[r + 1] = static_cast<index_t>(m.col_idx.size());
  }
  m.validate();
  return m;
}

/// n x n band matrix: nonzeros exactly at |i - j| <= half_bandwidth, all 1.0.
template <class T>
CsrMatrix<T> gen_banded(index_t n, index_t half_bandwidth) {
  if (n < 1) throw std::invalid_argument("gen_banded: n must be >= 1");
  if (half_bandwidth < 0 || half_bandwidth >= n)
    throw std::invalid_argument("gen_banded: need 0 <= half_bandwidth < n");

  CsrMatrix<T> m;
  m.n_rows = m.n_cols = n;
  m.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
  std::size_t total = 0;
  for (index_t r = 0; r < n; ++r) {
    const index_t lo = std::max<index_t>(0, r - half_bandwidth);
    const index_t hi = std::min<index_t>(n - 1, r + half_bandwidth);
    total += static_cast<std::size_t>(hi - lo + 1);
  }
  m.col_idx.reserve(total);
  m.values.reserve(total);
  for (index_t r = 0; r < n; ++r) {
    const index_t lo = std::max<index_t>(0, r - half_bandwidth);
    const index_t hi = std::min<index_t>(n - 1, r + half_bandwidth);
    for (index_t c = lo; c <= hi; ++c) {
      m.col_idx.push_back(c);
      m.values.push_back(T{1});
    }
    m.row_ptr[r + 1] = static_cast<index_t>(m.col_idx.size());
  }
  m.validate();
  return m;
}

}  // namespace tilefuse
