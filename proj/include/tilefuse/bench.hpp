#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tilefuse/csr.hpp"

namespace tilefuse::bench {

enum class Op { gemm_spmm, spmm_spmm };
enum class Precision { sp, dp };

struct Options {
  std::vector<std::string> matrix_paths;
  std::vector<std::string> gen_specs;  // "banded:N:W" | "random:N:D"
  Op op = Op::gemm_spmm;
  index_t b_cols = 32;
  index_t c_cols = 32;
  Precision precision = Precision::dp;
  int threads = 0;      // 0: TILEFUSE_THREADS, then hardware
  index_t ct_size = 2048;
  double cache_kb = 0.0;  // 0: discover, fallback 1280
  std::vector<std::string> variants{"fused", "unfused", "atomic",
                                    "overlapped"};
  int runs = 7;
  int warmup = 1;
  std::uint64_t seed = 42;
  std::string format = "csv";  // csv | json
  std::string out_path;        // empty: stdout
  index_t sweep_t_min = 64;
  index_t sweep_t_max = 8192;
};

/// One benchmark result line. Negative metric fields mean not applicable
/// for the variant.
struct Row {
  std::string matrix;
  index_t n = 0;
  std::int64_t nnz = 0;
  std::string op;
  std::string variant;
  std::string precision;
  index_t b_cols = 0;
  index_t c_cols = 0;
  int workers = 0;
  int runs = 0;
  double median_seconds = 0.0;
  double gflops = 0.0;
  double fused_ratio = -1.0;
  double scheduler_seconds = -1.0;
  double runs_to_amortize = -1.0;  // may be +inf
  std::int64_t replicated_rows = -1;
  std::string binding;
};

std::string op_name(Op op);
std::string precision_name(Precision p);

/// L1d + L2 + L3/cores from sysfs, in KB; 1280 when not discoverable.
double discover_cache_kb();

/// Scalar words per core for the scheduler budget.
std::size_t cache_words(double cache_kb, Precision precision);

/// --threads flag value, else TILEFUSE_THREADS, else hardware concurrency.
int resolve_threads(int flag_value);

/// Loads --matrix files and materializes --gen specs, in flag order.
/// Returns (display name, matrix) pairs.
std::vector<std::pair<std::string, CsrMatrix<double>>> load_inputs(
    const Options& opts);

std::string rows_to_csv(const std::vector<Row>& rows);
std::string rows_to_json(const std::vector<Row>& rows);

int cmd_run(const Options& opts);
int cmd_ratio_sweep(const Options& opts);
int cmd_schedule_dump(const Options& opts);
int cmd_verify(const Options& opts);

}  // namespace tilefuse::bench
