#include "tilefuse/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "tilefuse/baselines.hpp"
#include "tilefuse/generate.hpp"
#include "tilefuse/kernels.hpp"
#include "tilefuse/matrix_market.hpp"
#include "tilefuse/schedule_io.hpp"
#include "tilefuse/scheduler.hpp"
#include "tilefuse/verify.hpp"

namespace tilefuse::bench {

namespace {

namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

/// Verification mismatch; maps to exit code 1 instead of a usage error.
struct CorrectnessError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

volatile double g_sink = 0.0;  // keeps timed results observable

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

double parse_size_kb(const std::string& text) {
  if (text.empty()) return -1.0;
  double mult = 1.0;
  std::size_t digits = text.size();
  switch (text.back()) {
    case 'K': mult = 1.0; --digits; break;
    case 'M': mult = 1024.0; --digits; break;
    case 'G': mult = 1024.0 * 1024.0; --digits; break;
    default:
      if (!std::isdigit(static_cast<unsigned char>(text.back()))) return -1.0;
      mult = 1.0 / 1024.0;  // bare bytes
      break;
  }
  try {
    return std::stod(text.substr(0, digits)) * mult;
  } catch (const std::exception&) {
    return -1.0;
  }
}

std::string read_line(const fs::path& p) {
  std::ifstream in(p);
  std::string s;
  std::getline(in, s);
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

CsrMatrix<double> materialize_gen(const std::string& spec,
                                  std::uint64_t seed) {
  const auto parts = split(spec, ':');
  try {
    if (parts.size() == 3 && parts[0] == "banded")
      return gen_banded<double>(static_cast<index_t>(std::stol(parts[1])),
                                static_cast<index_t>(std::stol(parts[2])));
    if (parts.size() == 3 && parts[0] == "random")
      return gen_random_sparse<double>(
          static_cast<index_t>(std::stol(parts[1])), std::stod(parts[2]),
          seed);
  } catch (const std::exception&) {
    throw std::runtime_error("bad --gen spec: " + spec);
  }
  throw std::runtime_error(
      "bad --gen spec (want banded:N:W or random:N:D): " + spec);
}

template <class T>
DenseMatrix<T> gen_dense(index_t rows, index_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  DenseMatrix<T> m(rows, cols);
  for (auto& v : m.data)
    v = static_cast<T>(0.1 +
                       0.9 * static_cast<double>(rng() >> 11) * 0x1.0p-53);
  return m;
}

template <class T>
CsrMatrix<T> cast_matrix(const CsrMatrix<double>& m) {
  CsrMatrix<T> out;
  out.n_rows = m.n_rows;
  out.n_cols = m.n_cols;
  out.row_ptr = m.row_ptr;
  out.col_idx = m.col_idx;
  out.values.assign(m.values.begin(), m.values.end());
  return out;
}

template <class T>
FusedProblem<T> make_problem(const CsrMatrix<double>& a, Op op,
                             index_t b_cols, index_t c_cols,
                             std::uint64_t seed) {
  FusedProblem<T> p;
  p.a = cast_matrix<T>(a);
  if (op == Op::gemm_spmm) {
    p.b = gen_dense<T>(a.n_rows, b_cols, seed + 1);
    p.c = gen_dense<T>(b_cols, c_cols, seed + 2);
  } else {
    p.b = p.a;  // chained SpMM benchmarks use B = A, so bCol = n
    p.c = gen_dense<T>(a.n_cols, c_cols, seed + 2);
  }
  p.check();
  return p;
}

template <class T>
SchedulerConfig make_config(const Options& opts, int threads,
                            index_t b_cols_actual) {
  SchedulerConfig cfg;
  cfg.ct_size = opts.ct_size;
  cfg.num_workers = threads;
  const double kb = opts.cache_kb > 0.0 ? opts.cache_kb : discover_cache_kb();
  cfg.cache_size_words = cache_words(kb, sizeof(T) == sizeof(double)
                                             ? Precision::dp
                                             : Precision::sp);
  cfg.b_cols = b_cols_actual;
  cfg.c_cols = opts.c_cols;
  cfg.index_to_scalar_ratio = sizeof(T) == sizeof(double) ? 0.5 : 1.0;
  cfg.b_is_dense = opts.op == Op::gemm_spmm;
  return cfg;
}

double theoretical_flops(Op op, index_t n, std::int64_t nnz_a,
                         std::int64_t nnz_b, index_t b_cols,
                         index_t c_cols) {
  const double second_op = 2.0 * static_cast<double>(nnz_a) * c_cols;
  if (op == Op::gemm_spmm)
    return 2.0 * static_cast<double>(n) * b_cols * c_cols + second_op;
  return 2.0 * static_cast<double>(nnz_b) * c_cols + second_op;
}

template <class F>
double median_run_seconds(F&& body, int runs, int warmup) {
  for (int r = 0; r < warmup; ++r) body();
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(runs));
  for (int r = 0; r < runs; ++r) {
    const auto t0 = clock_type::now();
    body();
    times.push_back(seconds_since(t0));
  }
  std::sort(times.begin(), times.end());
  const std::size_t mid = times.size() / 2;
  if (times.size() % 2 == 1) return times[mid];
  return 0.5 * (times[mid - 1] + times[mid]);
}

std::string binding_label() {
  const char* env = std::getenv("OMP_PROC_BIND");
  return env && *env ? env : "default";
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string fmt_num(double v) {
  if (v < 0.0) return "";  // not applicable
  if (std::isinf(v)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_text(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open output file: " + out_path);
  out << text;
}

std::string check_variants(const std::vector<std::string>& variants) {
  static const std::vector<std::string> known{"fused", "unfused", "atomic",
                                              "overlapped"};
  if (variants.empty()) return "no variants requested";
  for (const auto& v : variants)
    if (std::find(known.begin(), known.end(), v) == known.end())
      return "unknown variant: " + v;
  return "";
}

template <class T>
std::vector<Row> run_rows(const std::string& name,
                          const CsrMatrix<double>& a_dbl,
                          const Options& opts) {
  if (!a_dbl.square())
    throw std::runtime_error(name +
                             ": matrix must be square for D = A(BC)");
  const int threads = resolve_threads(opts.threads);
  const FusedProblem<T> problem =
      make_problem<T>(a_dbl, opts.op, opts.b_cols, opts.c_cols, opts.seed);
  const SparsityView a(problem.a);
  const index_t n = a.n_rows;
  const SchedulerConfig cfg = make_config<T>(opts, threads, problem.b_cols());

  const auto t0 = clock_type::now();
  const FusedSchedule sched = build_schedule(a, cfg);
  const double scheduler_seconds = seconds_since(t0);
  const ValidationReport check = validate_schedule(a, sched, cfg);
  if (!check.pass) {
    for (const auto& v : check.violations) std::cerr << "  " << v << "\n";
    throw CorrectnessError(name + ": schedule validation failed");
  }

  const AtomicSchedule atomic_sched =
      build_atomic(a, static_cast<int>(sched.wavefronts[0].size()));
  const OverlappedSchedule overlapped_sched =
      build_overlapped(a, std::min<int>(threads, n));

  auto run_variant = [&](const std::string& v) -> DenseMatrix<T> {
    if (v == "fused")
      return opts.op == Op::gemm_spmm
                 ? fused_gemm_spmm(problem, sched, threads)
                 : fused_spmm_spmm(problem, sched, threads);
    if (v == "unfused")
      return opts.op == Op::gemm_spmm ? unfused_gemm_spmm(problem, threads)
                                      : unfused_spmm_spmm(problem, threads);
    if (v == "atomic") return run_atomic(problem, atomic_sched, threads);
    return run_overlapped(problem, overlapped_sched, threads);
  };

  if (n <= 4096) {
    const DenseMatrix<double> oracle = dense_oracle(problem);
    for (const auto& v : opts.variants) {
      const auto report =
          compare(run_variant(v), oracle, default_tolerance<T>());
      if (!report.pass)
        throw CorrectnessError(name + ": " + v +
                               " disagrees with the dense oracle (rel " +
                               std::to_string(report.rel_frobenius) + ")");
    }
  }

  const double flops =
      theoretical_flops(opts.op, n, a.nnz(), a.nnz(), problem.b_cols(),
                        problem.c_cols());
  std::vector<Row> rows;
  for (const auto& v : opts.variants) {
    Row row;
    row.matrix = name;
    row.n = n;
    row.nnz = a.nnz();
    row.op = op_name(opts.op);
    row.variant = v;
    row.precision = precision_name(opts.precision);
    row.b_cols = problem.b_cols();
    row.c_cols = problem.c_cols();
    row.workers = threads;
    row.runs = opts.runs;
    row.median_seconds = median_run_seconds(
        [&] { g_sink = static_cast<double>(run_variant(v).data[0]); },
        opts.runs, opts.warmup);
    row.gflops = flops / row.median_seconds / 1e9;
    row.binding = binding_label();
    if (v == "fused") {
      row.fused_ratio = fused_ratio(sched);
      row.scheduler_seconds = scheduler_seconds;
    }
    if (v == "overlapped") row.replicated_rows = overlapped_sched.replicated;
    rows.push_back(std::move(row));
  }

  auto find_row = [&rows](const std::string& v) -> Row* {
    for (auto& r : rows)
      if (r.variant == v) return &r;
    return nullptr;
  };
  Row* fused = find_row("fused");
  const Row* unfused = find_row("unfused");
  if (fused && unfused) {
    const double saved = unfused->median_seconds - fused->median_seconds;
    fused->runs_to_amortize =
        saved > 0.0 ? scheduler_seconds / saved
                    : std::numeric_limits<double>::infinity();
  }
  return rows;
}

struct SweepRow {
  std::string matrix;
  index_t tile_size = 0;
  double ratio = 0.0;
};

template <class T>
int verify_battery(const Options& opts, int threads, bool& any_fail) {
  struct Case {
    std::string name;
    CsrMatrix<double> a;
  };
  std::vector<Case> cases;
  const std::uint64_t seed = opts.seed;
  const std::pair<index_t, double> randoms[] = {
      {2, 0.5},  {3, 0.34}, {5, 0.3},   {9, 0.22},  {17, 0.2},
      {33, 0.1}, {64, 0.07}, {100, 0.05}, {151, 0.02}, {200, 0.03},
      {256, 0.01}, {300, 0.015}};
  int k = 0;
  for (const auto& [n, d] : randoms) {
    cases.push_back({"random:" + std::to_string(n) + ":" + std::to_string(d),
                     gen_random_sparse<double>(n, d, seed + k)});
    ++k;
  }
  cases.push_back({"banded:64:3", gen_banded<double>(64, 3)});
  cases.push_back({"banded:100:1", gen_banded<double>(100, 1)});

  const bool inject = [] {
    const char* env = std::getenv("TILEFUSE_INJECT_FAULT");
    return env && *env;
  }();

  for (const auto& c : cases) {
    for (const Op op : {Op::gemm_spmm, Op::spmm_spmm}) {
      Options local = opts;
      local.op = op;
      const FusedProblem<T> problem =
          make_problem<T>(c.a, op, opts.b_cols, opts.c_cols, seed + 77);
      const SparsityView a(problem.a);
      const SchedulerConfig cfg =
          make_config<T>(local, threads, problem.b_cols());
      const FusedSchedule sched = build_schedule(a, cfg);
      if (!validate_schedule(a, sched, cfg).pass) {
        std::cout << c.name << " " << op_name(op) << " schedule  FAIL\n";
        any_fail = true;
        continue;
      }
      const AtomicSchedule atomic_sched =
          build_atomic(a, static_cast<int>(sched.wavefronts[0].size()));
      const OverlappedSchedule overlapped_sched =
          build_overlapped(a, std::min<int>(threads, a.n_rows));
      const DenseMatrix<double> oracle = dense_oracle(problem);

      for (const std::string v :
           {"fused", "unfused", "atomic", "overlapped"}) {
        DenseMatrix<T> d =
            v == "fused"
                ? (op == Op::gemm_spmm ? fused_gemm_spmm(problem, sched,
                                                         threads)
                                       : fused_spmm_spmm(problem, sched,
                                                         threads))
            : v == "unfused"
                ? (op == Op::gemm_spmm ? unfused_gemm_spmm(problem, threads)
                                       : unfused_spmm_spmm(problem, threads))
            : v == "atomic"
                ? run_atomic(problem, atomic_sched, threads)
                : run_overlapped(problem, overlapped_sched, threads);
        if (inject && v == "fused")
          d.at(0, 0) += static_cast<T>(1) + std::abs(d.at(0, 0));
        const auto report = compare(d, oracle, default_tolerance<T>());
        std::cout << c.name << " " << op_name(op) << " "
                  << precision_name(local.precision) << " " << v
                  << " rel=" << report.rel_frobenius << "  "
                  << (report.pass ? "PASS" : "FAIL") << "\n";
        if (!report.pass) any_fail = true;
      }
    }
  }
  return 0;
}

}  // namespace

std::string op_name(Op op) {
  return op == Op::gemm_spmm ? "gemm-spmm" : "spmm-spmm";
}

std::string precision_name(Precision p) {
  return p == Precision::dp ? "dp" : "sp";
}

double discover_cache_kb() {
  const fs::path base = "/sys/devices/system/cpu/cpu0/cache";
  std::error_code ec;
  if (!fs::is_directory(base, ec)) return 1280.0;
  double l1d = 0.0;
  double l2 = 0.0;
  double l3 = 0.0;
  for (const auto& entry : fs::directory_iterator(base, ec)) {
    if (ec) break;
    const auto dir = entry.path();
    if (dir.filename().string().rfind("index", 0) != 0) continue;
    const std::string level = read_line(dir / "level");
    const std::string type = read_line(dir / "type");
    const double kb = parse_size_kb(read_line(dir / "size"));
    if (kb <= 0.0) continue;
    if (level == "1" && type == "Data") l1d = kb;
    if (level == "2") l2 = kb;
    if (level == "3") l3 = kb;
  }
  if (l1d + l2 + l3 <= 0.0) return 1280.0;
  const double cores =
      std::max(1u, std::thread::hardware_concurrency());
  return l1d + l2 + l3 / cores;
}

std::size_t cache_words(double cache_kb, Precision precision) {
  const double scalar = precision == Precision::dp ? 8.0 : 4.0;
  const double words = cache_kb * 1024.0 / scalar;
  return words < 1.0 ? 1 : static_cast<std::size_t>(words);
}

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("TILEFUSE_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::vector<std::pair<std::string, CsrMatrix<double>>> load_inputs(
    const Options& opts) {
  std::vector<std::pair<std::string, CsrMatrix<double>>> inputs;
  for (const auto& path : opts.matrix_paths)
    inputs.emplace_back(fs::path(path).filename().string(),
                        load_matrix_market<double>(path));
  for (const auto& spec : opts.gen_specs)
    inputs.emplace_back(spec, materialize_gen(spec, opts.seed));
  return inputs;
}

std::string rows_to_csv(const std::vector<Row>& rows) {
  std::ostringstream out;
  out << "matrix,n,nnz,op,variant,precision,bcol,ccol,workers,runs,"
         "median_seconds,gflops,fused_ratio,scheduler_seconds,"
         "runs_to_amortize,replicated_rows,binding\n";
  for (const auto& r : rows) {
    out << csv_escape(r.matrix) << ',' << r.n << ',' << r.nnz << ',' << r.op
        << ',' << r.variant << ',' << r.precision << ',' << r.b_cols << ','
        << r.c_cols << ',' << r.workers << ',' << r.runs << ','
        << fmt_num(r.median_seconds) << ',' << fmt_num(r.gflops) << ','
        << fmt_num(r.fused_ratio) << ',' << fmt_num(r.scheduler_seconds)
        << ',' << fmt_num(r.runs_to_amortize) << ','
        << (r.replicated_rows < 0 ? std::string()
                                  : std::to_string(r.replicated_rows))
        << ',' << csv_escape(r.binding) << '\n';
  }
  return out.str();
}

std::string rows_to_json(const std::vector<Row>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json o;
    o["matrix"] = r.matrix;
    o["n"] = r.n;
    o["nnz"] = r.nnz;
    o["op"] = r.op;
    o["variant"] = r.variant;
    o["precision"] = r.precision;
    o["bcol"] = r.b_cols;
    o["ccol"] = r.c_cols;
    o["workers"] = r.workers;
    o["runs"] = r.runs;
    o["median_seconds"] = r.median_seconds;
    o["gflops"] = r.gflops;
    o["fused_ratio"] =
        r.fused_ratio < 0 ? nlohmann::json() : nlohmann::json(r.fused_ratio);
    o["scheduler_seconds"] = r.scheduler_seconds < 0
                                 ? nlohmann::json()
                                 : nlohmann::json(r.scheduler_seconds);
    if (r.runs_to_amortize < 0)
      o["runs_to_amortize"] = nullptr;
    else if (std::isinf(r.runs_to_amortize))
      o["runs_to_amortize"] = "inf";
    else
      o["runs_to_amortize"] = r.runs_to_amortize;
    o["replicated_rows"] = r.replicated_rows < 0
                               ? nlohmann::json()
                               : nlohmann::json(r.replicated_rows);
    o["binding"] = r.binding;
    arr.push_back(std::move(o));
  }
  return arr.dump(2) + "\n";
}

int cmd_run(const Options& opts) {
  try {
    if (const auto err = check_variants(opts.variants); !err.empty())
      throw std::runtime_error(err);
    if (opts.runs < 1 || opts.warmup < 0)
      throw std::runtime_error("need --runs >= 1 and warmup >= 0");
    const auto inputs = load_inputs(opts);
    if (inputs.size() != 1)
      throw std::runtime_error(
          "run takes exactly one input (--matrix or --gen)");
    const auto& [name, a] = inputs.front();
    const std::vector<Row> rows = opts.precision == Precision::dp
                                      ? run_rows<double>(name, a, opts)
                                      : run_rows<float>(name, a, opts);
    write_text(opts.out_path,
               opts.format == "json" ? rows_to_json(rows) : rows_to_csv(rows));
    return 0;
  } catch (const CorrectnessError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_ratio_sweep(const Options& opts) {
  try {
    const auto inputs = load_inputs(opts);
    if (inputs.empty())
      throw std::runtime_error("ratio-sweep needs at least one input");
    if (opts.sweep_t_min < 1 || opts.sweep_t_max < opts.sweep_t_min)
      throw std::runtime_error("bad sweep tile-size bounds");

    std::vector<index_t> ladder;
    for (index_t t = opts.sweep_t_min; t <= opts.sweep_t_max; t *= 2)
      ladder.push_back(t);

    std::vector<SweepRow> rows;
    bool monotone = true;
    for (const auto& [name, a] : inputs) {
      if (!a.square())
        throw std::runtime_error(name + ": matrix must be square");
      double prev = -1.0;
      for (const index_t t : ladder) {
        const IntermediateSchedule inter = step1_coarse_fuse(a, t);
        std::size_t fused = 0;
        for (const auto& tile : inter.tiles) fused += tile.j_rows.size();
        const double ratio = static_cast<double>(fused) /
                             (2.0 * static_cast<double>(a.n_rows));
        if (prev >= 0.0 && ratio < prev - 1e-12) {
          std::cerr << "monotonicity violation: " << name << " t=" << t
                    << " ratio " << ratio << " < " << prev << "\n";
          monotone = false;
        }
        prev = ratio;
        rows.push_back({name, t, ratio});
      }
    }
    for (const index_t t : ladder) {
      double sum = 0.0;
      int count = 0;
      for (const auto& r : rows)
        if (r.tile_size == t && r.matrix != "mean") {
          sum += r.ratio;
          ++count;
        }
      rows.push_back({"mean", t, sum / count});
    }

    std::ostringstream out;
    if (opts.format == "json") {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& r : rows)
        arr.push_back({{"matrix", r.matrix},
                       {"tile_size", r.tile_size},
                       {"fused_ratio", r.ratio}});
      out << arr.dump(2) << "\n";
    } else {
      out << "matrix,tile_size,fused_ratio\n";
      for (const auto& r : rows) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.9g", r.ratio);
        out << csv_escape(r.matrix) << ',' << r.tile_size << ',' << buf
            << '\n';
      }
    }
    write_text(opts.out_path, out.str());
    return monotone ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_schedule_dump(const Options& opts) {
  try {
    const auto inputs = load_inputs(opts);
    if (inputs.size() != 1)
      throw std::runtime_error(
          "schedule-dump takes exactly one input (--matrix or --gen)");
    const auto& [name, a] = inputs.front();
    if (!a.square())
      throw std::runtime_error(name + ": matrix must be square");
    const int threads = resolve_threads(opts.threads);
    const index_t b_cols_actual =
        opts.op == Op::gemm_spmm ? opts.b_cols : a.n_cols;
    const SchedulerConfig cfg =
        opts.precision == Precision::dp
            ? make_config<double>(opts, threads, b_cols_actual)
            : make_config<float>(opts, threads, b_cols_actual);
    const FusedSchedule sched = build_schedule(a, cfg);
    write_text(opts.out_path, schedule_to_json(sched));
    const ValidationReport report = validate_schedule(a, sched, cfg);
    if (!report.pass) {
      for (const auto& v : report.violations)
        std::cerr << "violation: " << v << "\n";
      return 1;
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_verify(const Options& opts) {
  try {
    const int threads = resolve_threads(opts.threads);
    bool any_fail = false;
    Options dp = opts;
    dp.precision = Precision::dp;
    verify_battery<double>(dp, threads, any_fail);
    Options sp = opts;
    sp.precision = Precision::sp;
    verify_battery<float>(sp, threads, any_fail);
    std::cout << (any_fail ? "VERIFY: FAIL\n" : "VERIFY: PASS\n");
    return any_fail ? 1 : 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace tilefuse::bench
