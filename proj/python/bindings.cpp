#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>

#include <cstring>
#include <stdexcept>
#include <vector>

#include "tilefuse/csr.hpp"
#include "tilefuse/dense.hpp"
#include "tilefuse/generate.hpp"
#include "tilefuse/kernels.hpp"
#include "tilefuse/matrix_market.hpp"
#include "tilefuse/schedule_io.hpp"
#include "tilefuse/scheduler.hpp"

namespace py = pybind11;

namespace {

using tilefuse::CsrMatrix;
using tilefuse::DenseMatrix;
using tilefuse::FusedProblem;
using tilefuse::FusedSchedule;
using tilefuse::index_t;
using tilefuse::SchedulerConfig;

using IndexArray =
    py::array_t<index_t, py::array::c_style | py::array::forcecast>;
using ScalarArray =
    py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<index_t> to_index_vec(const IndexArray& arr) {
  if (arr.ndim() != 1)
    throw std::invalid_argument("expected a 1-D index array");
  return {arr.data(), arr.data() + arr.size()};
}

CsrMatrix<double> make_csr(index_t n_rows, index_t n_cols,
                           const IndexArray& row_ptr,
                           const IndexArray& col_idx,
                           const ScalarArray& values) {
  if (values.ndim() != 1)
    throw std::invalid_argument("expected a 1-D value array");
  return CsrMatrix<double>::checked(
      n_rows, n_cols, to_index_vec(row_ptr), to_index_vec(col_idx),
      {values.data(), values.data() + values.size()});
}

DenseMatrix<double> make_dense(const ScalarArray& arr) {
  if (arr.ndim() != 2)
    throw std::invalid_argument("expected a 2-D array");
  DenseMatrix<double> m(static_cast<index_t>(arr.shape(0)),
                        static_cast<index_t>(arr.shape(1)));
  std::memcpy(m.data.data(), arr.data(), m.data.size() * sizeof(double));
  return m;
}

py::array_t<double> to_numpy(const DenseMatrix<double>& m) {
  py::array_t<double> out(
      {static_cast<py::ssize_t>(m.n_rows), static_cast<py::ssize_t>(m.n_cols)});
  std::memcpy(out.mutable_data(), m.data.data(),
              m.data.size() * sizeof(double));
  return out;
}

SchedulerConfig make_config(int workers, index_t ct_size,
                            std::size_t cache_words, index_t b_cols,
                            index_t c_cols, bool b_dense) {
  SchedulerConfig cfg;
  cfg.num_workers = workers;
  cfg.ct_size = ct_size;
  cfg.cache_size_words = cache_words;
  cfg.b_cols = b_cols;
  cfg.c_cols = c_cols;
  cfg.b_is_dense = b_dense;
  return cfg;
}

FusedSchedule checked_schedule(const CsrMatrix<double>& a,
                               const SchedulerConfig& cfg) {
  FusedSchedule sched = tilefuse::build_schedule(a, cfg);
  const auto report = tilefuse::validate_schedule(a, sched, cfg);
  if (!report.pass)
    throw std::runtime_error("schedule validation failed: " +
                             report.violations.front());
  return sched;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sparsity-fused D = A*(B*C): scheduler and executors";

  py::class_<CsrMatrix<double>>(m, "Csr")
      .def(py::init(&make_csr), py::arg("n_rows"), py::arg("n_cols"),
           py::arg("row_ptr"), py::arg("col_idx"), py::arg("values"))
      .def_readonly("n_rows", &CsrMatrix<double>::n_rows)
      .def_readonly("n_cols", &CsrMatrix<double>::n_cols)
      .def_property_readonly(
          "nnz", [](const CsrMatrix<double>& a) { return a.nnz(); })
      .def("to_dense",
           [](const CsrMatrix<double>& a) {
             return to_numpy(tilefuse::csr_to_dense(a));
           })
      .def("__repr__", [](const CsrMatrix<double>& a) {
        return "Csr(" + std::to_string(a.n_rows) + "x" +
               std::to_string(a.n_cols) + ", nnz=" +
               std::to_string(a.nnz()) + ")";
      });

  m.def("gen_random_sparse", &tilefuse::gen_random_sparse<double>,
        py::arg("n"), py::arg("density"), py::arg("seed") = 42);
  m.def("gen_banded", &tilefuse::gen_banded<double>, py::arg("n"),
        py::arg("half_bandwidth"));
  m.def("load_matrix_market", &tilefuse::load_matrix_market<double>,
        py::arg("path"));

  m.def(
      "schedule_json",
      [](const CsrMatrix<double>& a, int workers, index_t ct_size,
         std::size_t cache_words, index_t b_cols, index_t c_cols,
         bool b_dense) {
        return tilefuse::schedule_to_json(checked_schedule(
            a, make_config(workers, ct_size, cache_words, b_cols, c_cols,
                           b_dense)));
      },
      py::arg("a"), py::arg("workers") = 1, py::arg("ct_size") = 2048,
      py::arg("cache_words") = std::size_t{160} * 1024,
      py::arg("b_cols") = 32, py::arg("c_cols") = 32,
      py::arg("b_dense") = true);

  m.def(
      "fused_ratio",
      [](const CsrMatrix<double>& a, index_t tile_size) {
        const auto inter = tilefuse::step1_coarse_fuse(a, tile_size);
        std::size_t fused = 0;
        for (const auto& tile : inter.tiles) fused += tile.j_rows.size();
        return static_cast<double>(fused) / (2.0 * a.n_rows);
      },
      py::arg("a"), py::arg("tile_size"),
      "Fraction of row computations fused at the given tile size");

  m.def(
      "fused_gemm_spmm",
      [](const CsrMatrix<double>& a, const ScalarArray& b,
         const ScalarArray& c, int workers, index_t ct_size,
         std::size_t cache_words) {
        FusedProblem<double> problem{a, make_dense(b), make_dense(c)};
        const auto cfg =
            make_config(workers, ct_size, cache_words, problem.b_cols(),
                        problem.c_cols(), true);
        return to_numpy(tilefuse::fused_gemm_spmm(
            problem, checked_schedule(a, cfg), workers));
      },
      py::arg("a"), py::arg("b"), py::arg("c"), py::arg("workers") = 1,
      py::arg("ct_size") = 2048,
      py::arg("cache_words") = std::size_t{160} * 1024);

  m.def(
      "fused_spmm_spmm",
      [](const CsrMatrix<double>& a, const CsrMatrix<double>& b,
         const ScalarArray& c, int workers, index_t ct_size,
         std::size_t cache_words) {
        FusedProblem<double> problem{a, b, make_dense(c)};
        const auto cfg =
            make_config(workers, ct_size, cache_words, problem.b_cols(),
                        problem.c_cols(), false);
        return to_numpy(tilefuse::fused_spmm_spmm(
            problem, checked_schedule(a, cfg), workers));
      },
      py::arg("a"), py::arg("b"), py::arg("c"), py::arg("workers") = 1,
      py::arg("ct_size") = 2048,
      py::arg("cache_words") = std::size_t{160} * 1024);

  m.def(
      "unfused_gemm_spmm",
      [](const CsrMatrix<double>& a, const ScalarArray& b,
         const ScalarArray& c, int workers) {
        FusedProblem<double> problem{a, make_dense(b), make_dense(c)};
        return to_numpy(tilefuse::unfused_gemm_spmm(problem, workers));
      },
      py::arg("a"), py::arg("b"), py::arg("c"), py::arg("workers") = 1);

  m.def(
      "unfused_spmm_spmm",
      [](const CsrMatrix<double>& a, const CsrMatrix<double>& b,
         const ScalarArray& c, int workers) {
        FusedProblem<double> problem{a, b, make_dense(c)};
        return to_numpy(tilefuse::unfused_spmm_spmm(problem, workers));
      },
      py::arg("a"), py::arg("b"), py::arg("c"), py::arg("workers") = 1);
}
