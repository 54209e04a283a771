#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "tilefuse/verify.hpp"

using namespace tilefuse;
using namespace tf_test;

TEST_CASE("compare reports zero difference for identical matrices") {
  const auto d = random_dense<double>(6, 4, 1);
  const auto report = compare(d, d, kTolDouble);
  CHECK(report.pass);
  CHECK(report.max_abs_diff == 0.0);
  CHECK(report.rel_frobenius == 0.0);
  CHECK(report.tolerance == kTolDouble);
}

TEST_CASE("compare normalizes a single perturbation by the reference norm") {
  DenseMatrix<double> dy(3, 3);
  double norm_sq = 0.0;
  for (index_t k = 0; k < 9; ++k) {
    dy.data[static_cast<std::size_t>(k)] = static_cast<double>(k + 1);
    norm_sq += static_cast<double>((k + 1) * (k + 1));
  }
  auto dx = dy;
  dx.at(0, 0) += 0.5;

  const auto report = compare(dx, dy, 0.1);
  CHECK(report.max_abs_diff == 0.5);
  CHECK(report.rel_frobenius ==
        doctest::Approx(0.5 / std::sqrt(norm_sq)).epsilon(1e-12));
  CHECK(report.pass);  // 0.5/16.88 ~ 0.03 < 0.1

  const auto strict = compare(dx, dy, 1e-3);
  CHECK(!strict.pass);
}

TEST_CASE("compare guards the all-zero reference") {
  DenseMatrix<double> zero(2, 2);
  auto dx = zero;
  dx.at(0, 0) = 1e-12;
  const auto report = compare(dx, zero, kTolDouble);
  CHECK(!report.pass);  // relative to nothing, any difference is infinite-ish
  CHECK(compare(zero, zero, kTolDouble).pass);
}

TEST_CASE("compare rejects shape mismatches") {
  DenseMatrix<double> a(2, 3);
  DenseMatrix<double> b(3, 2);
  CHECK_THROWS_AS(compare(a, b, 1.0), std::invalid_argument);
}

TEST_CASE("compare works across precisions") {
  const auto dd = random_dense<double>(5, 5, 2);
  DenseMatrix<float> df(5, 5);
  for (std::size_t k = 0; k < dd.data.size(); ++k)
    df.data[k] = static_cast<float>(dd.data[k]);
  CHECK(compare(df, dd, kTolSingle).pass);
}

TEST_CASE("dense oracle equals an independent loop-order chain") {
  const auto a = gen_random_sparse<double>(50, 0.1, 14);
  SUBCASE("dense B") {
    FusedProblem<double> p{a, random_dense<double>(50, 7, 1),
                           random_dense<double>(7, 9, 2)};
    const auto expect = mul_ikj(
        csr_to_dense(a),
        mul_ikj(widen(std::get<DenseMatrix<double>>(p.b)), widen(p.c)));
    const auto got = dense_oracle(p);
    CHECK(got.data == expect.data);
  }
  SUBCASE("sparse B") {
    FusedProblem<double> p{a, gen_rect_random(50, 11, 0.25, 3),
                           random_dense<double>(11, 6, 4)};
    const auto expect = mul_ikj(
        csr_to_dense(a),
        mul_ikj(csr_to_dense(std::get<CsrMatrix<double>>(p.b)), widen(p.c)));
    CHECK(dense_oracle(p).data == expect.data);
  }
}

TEST_CASE("dense oracle refuses huge materializations") {
  const auto a = make_identity(4097);
  FusedProblem<double> p{a, random_dense<double>(4097, 1, 1),
                         random_dense<double>(1, 1, 2)};
  CHECK_THROWS_AS(dense_oracle(p), std::invalid_argument);
}

TEST_CASE("dense oracle widens single-precision operands") {
  const auto a = gen_random_sparse<float>(30, 0.15, 6);
  FusedProblem<float> p{a, random_dense<float>(30, 5, 7),
                        random_dense<float>(5, 5, 8)};
  const auto ref = dense_oracle(p);
  CHECK(ref.n_rows == 30);
  CHECK(ref.n_cols == 5);
  const auto d = unfused_gemm_spmm(p, 1);
  CHECK(compare(d, ref, kTolSingle).pass);
}
