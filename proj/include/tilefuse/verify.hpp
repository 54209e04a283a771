#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "tilefuse/dense.hpp"
#include "tilefuse/kernels.hpp"

namespace tilefuse {

inline constexpr double kTolDouble = 1e-10;
inline constexpr double kTolSingle = 1e-4;

template <class T>
constexpr double default_tolerance() {
  return sizeof(T) == sizeof(double) ? kTolDouble : kTolSingle;
}

struct ComparisonReport {
  double max_abs_diff = 0.0;
  double rel_frobenius = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

namespace detail {

inline DenseMatrix<double> dense_mul(const DenseMatrix<double>& x,
                                     const DenseMatrix<double>& y) {
  DenseMatrix<double> out(x.n_rows, y.n_cols);
  for (index_t i = 0; i < x.n_rows; ++i) {
    const double* xrow = x.row(i);
    double* orow = out.row(i);
    for (index_t j = 0; j < y.n_cols; ++j) {
      double sum = 0.0;
      for (index_t k = 0; k < x.n_cols; ++k) sum += xrow[k] * y.at(k, j);
      orow[j] = sum;
    }
  }
  return out;
}

}  // namespace detail

/// Reference result computed from fully dense double-precision operands.
/// Guarded against accidental huge materializations.
template <class T>
DenseMatrix<double> dense_oracle(const FusedProblem<T>& problem) {
  problem.check();
  if (problem.n() > 4096)
    throw std::invalid_argument("dense_oracle: n > 4096");
  const DenseMatrix<double> a = csr_to_dense(problem.a);
  const DenseMatrix<double> b =
      problem.b_is_dense() ? widen(std::get<DenseMatrix<T>>(problem.b))
                           : csr_to_dense(std::get<CsrMatrix<T>>(problem.b));
  const DenseMatrix<double> c = widen(problem.c);
  return detail::dense_mul(a, detail::dense_mul(b, c));
}

template <class Tx, class Ty>
ComparisonReport compare(const DenseMatrix<Tx>& dx, const DenseMatrix<Ty>& dy,
                         double tolerance) {
  if (dx.n_rows != dy.n_rows || dx.n_cols != dy.n_cols)
    throw std::invalid_argument("compare: shape mismatch");
  double diff_sq = 0.0;
  double ref_sq = 0.0;
  double max_abs = 0.0;
  for (std::size_t k = 0; k < dx.data.size(); ++k) {
    const double x = static_cast<double>(dx.data[k]);
    const double y = static_cast<double>(dy.data[k]);
    diff_sq += (x - y) * (x - y);
    ref_sq += y * y;
    max_abs = std::max(max_abs, std::abs(x - y));
  }
  ComparisonReport report;
  report.max_abs_diff = max_abs;
  report.rel_frobenius =
      std::sqrt(diff_sq) /
      std::max(std::sqrt(ref_sq), std::numeric_limits<double>::min());
  report.tolerance = tolerance;
  report.pass = report.rel_frobenius <= tolerance;
  return report;
}

}  // namespace tilefuse
