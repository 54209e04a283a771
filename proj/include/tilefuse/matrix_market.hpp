#pragma once

#include <cstdio>
#include <fstream>
#include <string>

#include "tilefuse/csr.hpp"

namespace tilefuse {

namespace detail {

struct MmTriplets {
  index_t n_rows = 0;
  index_t n_cols = 0;
  std::vector<Triplet<double>> entries;  // symmetric files already expanded
};

/// Parses a Matrix Market coordinate stream (real/integer/pattern field,
/// general or symmetric). Pattern entries get value 1.0; symmetric
/// off-diagonals are mirrored. Throws std::runtime_error on malformed input.
MmTriplets parse_matrix_market(std::istream& in, const std::string& origin);

}  // namespace detail

template <class T>
CsrMatrix<T> load_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  auto trip = detail::parse_matrix_market(in, path);
  std::vector<Triplet<T>> cast;
  cast.reserve(trip.entries.size());
  for (const auto& e : trip.entries)
    cast.push_back({e.row, e.col, static_cast<T>(e.value)});
  return csr_from_triplets<T>(trip.n_rows, trip.n_cols, std::move(cast));
}

/// Writes coordinate format with enough digits that reloading reproduces the
/// stored values exactly.
template <class T>
void write_matrix_market(const CsrMatrix<T>& m, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.n_rows << " " << m.n_cols << " " << m.nnz() << "\n";
  char buf[64];
  for (index_t r = 0; r < m.n_rows; ++r) {
    for (index_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) {
      std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", r + 1, m.col_idx[k] + 1,
                    static_cast<double>(m.values[k]));
      out << buf;
    }
  }
}

template <class T>
void write_matrix_market(const CsrMatrix<T>& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_matrix_market(m, out);
}

}  // namespace tilefuse
