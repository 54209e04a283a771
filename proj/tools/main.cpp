#include <cstdlib>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "tilefuse/bench.hpp"

namespace {

using tilefuse::bench::Op;
using tilefuse::bench::Options;
using tilefuse::bench::Precision;

void add_input_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--matrix", o.matrix_paths,
                  "Matrix Market coordinate file (.mtx)");
  cmd->add_option("--gen", o.gen_specs,
                  "Synthetic input, banded:N:W or random:N:D");
}

void add_problem_flags(CLI::App* cmd, Options& o) {
  static const std::map<std::string, Op> ops{
      {"gemm-spmm", Op::gemm_spmm}, {"spmm-spmm", Op::spmm_spmm}};
  static const std::map<std::string, Precision> precisions{
      {"sp", Precision::sp}, {"dp", Precision::dp}};
  cmd->add_option("--op", o.op, "gemm-spmm (dense B) or spmm-spmm (B = A)")
      ->transform(CLI::CheckedTransformer(ops));
  cmd->add_option("--bcol", o.b_cols, "Columns of B (gemm-spmm only)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--ccol", o.c_cols, "Columns of C")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--precision", o.precision, "sp or dp")
      ->transform(CLI::CheckedTransformer(precisions));
  cmd->add_option("--threads", o.threads,
                  "Worker count (default: TILEFUSE_THREADS, then hardware)");
  cmd->add_option("--ctsize", o.ct_size, "Coarse tile size heuristic")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--cache-kb", o.cache_kb,
                  "Per-core cache budget in KB (default: discovered, "
                  "fallback 1280)");
  cmd->add_option("--seed", o.seed, "Seed for generated matrices and values");
}

void add_output_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--format", o.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", o.out_path, "Output path (default: stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  // Compact placement and sleeping waits, best-effort; never overrides the
  // user's env. Spinning waiters starve the workers when cores are shared.
  setenv("OMP_PROC_BIND", "close", 0);
  setenv("OMP_WAIT_POLICY", "passive", 0);

  CLI::App app{"Benchmark driver for sparsity-fused D = A*(B*C)"};
  app.require_subcommand(1);

  Options run_opts;
  auto* run = app.add_subcommand(
      "run", "Time the requested variants on one matrix");
  add_input_flags(run, run_opts);
  add_problem_flags(run, run_opts);
  add_output_flags(run, run_opts);
  run->add_option("--variants", run_opts.variants,
                  "Any of fused,unfused,atomic,overlapped")
      ->delimiter(',');
  run->add_option("--runs", run_opts.runs, "Timed runs per variant")
      ->check(CLI::PositiveNumber);
  run->add_option("--warmup", run_opts.warmup, "Warmup runs per variant")
      ->check(CLI::NonNegativeNumber);

  Options sweep_opts;
  auto* sweep = app.add_subcommand(
      "ratio-sweep", "Fused ratio over a doubling tile-size ladder");
  add_input_flags(sweep, sweep_opts);
  add_output_flags(sweep, sweep_opts);
  sweep->add_option("--t-min", sweep_opts.sweep_t_min, "Ladder start")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--t-max", sweep_opts.sweep_t_max, "Ladder end")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--seed", sweep_opts.seed,
                    "Seed for generated matrices");

  Options dump_opts;
  auto* dump = app.add_subcommand("schedule-dump",
                                  "Build, validate and emit a schedule");
  add_input_flags(dump, dump_opts);
  add_problem_flags(dump, dump_opts);
  add_output_flags(dump, dump_opts);

  Options verify_opts;
  auto* verify = app.add_subcommand(
      "verify", "Check every variant against the dense oracle");
  add_problem_flags(verify, verify_opts);

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return tilefuse::bench::cmd_run(run_opts);
  if (sweep->parsed()) return tilefuse::bench::cmd_ratio_sweep(sweep_opts);
  if (dump->parsed()) return tilefuse::bench::cmd_schedule_dump(dump_opts);
  if (verify->parsed()) return tilefuse::bench::cmd_verify(verify_opts);
  return 2;
}
