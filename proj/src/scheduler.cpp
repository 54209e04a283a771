#include "tilefuse/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace tilefuse {

namespace {

index_t ceil_div(index_t a, index_t b) { return (a + b - 1) / b; }

std::size_t ceil_div_z(std::size_t a, std::size_t b) {
  return (a + b - 1) / b;
}

/// Epoch-marked column scratch so repeated cost evaluations stay O(nnz of
/// the tile) instead of O(n).
struct CostScratch {
  std::vector<std::int64_t> mark;
  std::int64_t epoch = 0;

  explicit CostScratch(index_t n_cols)
      : mark(static_cast<std::size_t>(n_cols), 0) {}
};

double tile_cost_ws(const SparsityView& a, const FusedTile& tile,
                    const SchedulerConfig& cfg, CostScratch& scratch) {
  const double t = static_cast<double>(tile.width());
  const double j_count = static_cast<double>(tile.j_rows.size());

  double nnz_j = 0.0;
  double uc = 0.0;
  const std::int64_t epoch = ++scratch.epoch;
  for (const index_t j : tile.j_rows) {
    for (const index_t col : a.row_cols(j)) {
      ++nnz_j;
      if (scratch.mark[static_cast<std::size_t>(col)] != epoch) {
        scratch.mark[static_cast<std::size_t>(col)] = epoch;
        ++uc;
      }
    }
  }

  const double c_cols = static_cast<double>(cfg.c_cols);
  const double b_cols = static_cast<double>(cfg.b_cols);
  if (cfg.b_is_dense) {
    const double first_op_rows =
        cfg.whole_b_cost ? static_cast<double>(a.n_rows) : t;
    const double idx =
        std::ceil((nnz_j + j_count + 1.0) * cfg.index_to_scalar_ratio);
    return (uc + t + j_count) * c_cols + first_op_rows * b_cols + idx;
  }
  // Sparse B: its per-row footprint is approximated with A's pattern, the
  // only pattern the scheduler sees.
  double nnz_b = 0.0;
  for (index_t i = tile.i_lo; i < tile.i_hi; ++i)
    nnz_b += static_cast<double>(a.row_nnz(i));
  const double idx = std::ceil(
      (nnz_j + j_count + 1.0 + nnz_b + t + 1.0) * cfg.index_to_scalar_ratio);
  return (nnz_b + nnz_j + uc + t + j_count) * c_cols + idx;
}

void split_rec(const SparsityView& a, FusedTile tile,
               const SchedulerConfig& cfg, CostScratch& scratch,
               std::vector<FusedTile>& pieces,
               std::vector<index_t>& demoted) {
  tile.cost = tile_cost_ws(a, tile, cfg, scratch);
  if (tile.cost <= static_cast<double>(cfg.cache_size_words) ||
      tile.width() <= 1) {
    pieces.push_back(std::move(tile));
    return;
  }
  const index_t mid = tile.i_lo + tile.width() / 2;
  FusedTile left{tile.i_lo, mid, {}, 0.0};
  FusedTile right{mid, tile.i_hi, {}, 0.0};
  for (const index_t j : tile.j_rows) {
    const auto cols = a.row_cols(j);
    if (cols.empty()) {
      (j < mid ? left : right).j_rows.push_back(j);
    } else if (cols.back() < mid) {
      left.j_rows.push_back(j);
    } else if (cols.front() >= mid) {
      right.j_rows.push_back(j);
    } else {
      demoted.push_back(j);
    }
  }
  split_rec(a, std::move(left), cfg, scratch, pieces, demoted);
  split_rec(a, std::move(right), cfg, scratch, pieces, demoted);
}

/// Wavefront-1 tiles have no i_range to bisect, so over-budget ones are
/// halved by iteration count instead.
void bisect_by_count(const SparsityView& a, FusedTile tile,
                     const SchedulerConfig& cfg, CostScratch& scratch,
                     std::vector<FusedTile>& out) {
  tile.cost = tile_cost_ws(a, tile, cfg, scratch);
  if (tile.cost <= static_cast<double>(cfg.cache_size_words) ||
      tile.j_rows.size() <= 1) {
    out.push_back(std::move(tile));
    return;
  }
  const auto half = tile.j_rows.size() / 2;
  FusedTile left{0, 0, {tile.j_rows.begin(), tile.j_rows.begin() + half},
                 0.0};
  FusedTile right{0, 0, {tile.j_rows.begin() + half, tile.j_rows.end()},
                  0.0};
  bisect_by_count(a, std::move(left), cfg, scratch, out);
  bisect_by_count(a, std::move(right), cfg, scratch, out);
}

void require_square(const SparsityView& a, const char* who) {
  if (!a.square())
    throw std::invalid_argument(std::string(who) + ": matrix must be square");
  if (a.n_rows < 1)
    throw std::invalid_argument(std::string(who) + ": matrix must be nonempty");
}

}  // namespace

index_t choose_tile_size(index_t n, int num_workers, index_t ct_size) {
  if (n < 1 || num_workers < 1 || ct_size < 1)
    throw std::invalid_argument("choose_tile_size: all inputs must be >= 1");
  const auto p = static_cast<index_t>(num_workers);
  return ceil_div(n, ct_size) >= p ? ct_size : ceil_div(n, p);
}

IntermediateSchedule step1_coarse_fuse(const SparsityView& a,
                                       index_t tile_size) {
  require_square(a, "step1_coarse_fuse");
  if (tile_size < 1)
    throw std::invalid_argument("step1_coarse_fuse: tile_size must be >= 1");

  const index_t n = a.n_rows;
  IntermediateSchedule out;
  out.n = n;
  out.tile_size = tile_size;
  const index_t num_tiles = ceil_div(n, tile_size);
  out.tiles.resize(static_cast<std::size_t>(num_tiles));
  for (index_t v = 0; v < num_tiles; ++v) {
    out.tiles[v].i_lo = v * tile_size;
    out.tiles[v].i_hi = std::min<index_t>((v + 1) * tile_size, n);
  }
  for (index_t j = 0; j < n; ++j) {
    const auto cols = a.row_cols(j);
    if (cols.empty()) {
      out.tiles[j / tile_size].j_rows.push_back(j);
      continue;
    }
    // Columns are sorted, so front/back bound every in-edge.
    const index_t v = cols.front() / tile_size;
    if (cols.back() < out.tiles[v].i_hi)
      out.tiles[v].j_rows.push_back(j);
    else
      out.unfused_rows.push_back(j);
  }
  return out;
}

std::vector<std::vector<index_t>> balance(
    const std::vector<index_t>& rows,
    const std::vector<index_t>& row_weight, std::size_t num_chunks) {
  if (num_chunks < 1)
    throw std::invalid_argument("balance: num_chunks must be >= 1");
  std::vector<std::vector<index_t>> chunks(num_chunks);

  std::int64_t rem_weight = 0;
  for (const index_t j : rows)
    rem_weight += row_weight[static_cast<std::size_t>(j)];

  std::size_t i = 0;
  for (std::size_t c = 0; c < num_chunks && i < rows.size(); ++c) {
    const std::size_t rem_chunks = num_chunks - c;
    const std::int64_t ideal =
        (rem_weight + static_cast<std::int64_t>(rem_chunks) - 1) /
        static_cast<std::int64_t>(rem_chunks);
    auto& chunk = chunks[c];
    std::int64_t w = row_weight[static_cast<std::size_t>(rows[i])];
    chunk.push_back(rows[i++]);
    // Greedy fill to the running ideal; always keep at least one row in
    // reserve per remaining chunk.
    while (i < rows.size() && rows.size() - i > rem_chunks - 1) {
      const std::int64_t next = row_weight[static_cast<std::size_t>(rows[i])];
      if (w + next > ideal) break;
      w += next;
      chunk.push_back(rows[i++]);
    }
    rem_weight -= w;
  }
  return chunks;
}

double tile_cost(const SparsityView& a, const FusedTile& tile,
                 const SchedulerConfig& cfg) {
  CostScratch scratch(a.n_cols);
  return tile_cost_ws(a, tile, cfg, scratch);
}

SplitResult split_tile(const SparsityView& a, FusedTile tile,
                       const SchedulerConfig& cfg) {
  CostScratch scratch(a.n_cols);
  SplitResult result;
  split_rec(a, std::move(tile), cfg, scratch, result.pieces,
            result.demoted_rows);
  std::sort(result.demoted_rows.begin(), result.demoted_rows.end());
  return result;
}

FusedSchedule build_schedule(const SparsityView& a,
                             const SchedulerConfig& cfg) {
  require_square(a, "build_schedule");
  const index_t n = a.n_rows;
  const index_t t = choose_tile_size(n, cfg.num_workers, cfg.ct_size);
  IntermediateSchedule inter = step1_coarse_fuse(a, t);

  FusedSchedule out;
  out.n = n;
  out.tile_size = t;
  out.wavefronts.resize(2);

  CostScratch scratch(n);
  std::vector<index_t> unfused = std::move(inter.unfused_rows);
  for (auto& tile : inter.tiles)
    split_rec(a, std::move(tile), cfg, scratch, out.wavefronts[0], unfused);

  if (!unfused.empty()) {
    std::sort(unfused.begin(), unfused.end());
    std::vector<index_t> weights(static_cast<std::size_t>(n));
    for (index_t j = 0; j < n; ++j)
      weights[static_cast<std::size_t>(j)] = a.row_nnz(j);
    const std::size_t num_chunks =
        std::max<std::size_t>(static_cast<std::size_t>(cfg.num_workers),
                              ceil_div_z(unfused.size(),
                                         static_cast<std::size_t>(cfg.ct_size)));
    for (auto& chunk : balance(unfused, weights, num_chunks)) {
      if (chunk.empty()) continue;
      bisect_by_count(a, FusedTile{0, 0, std::move(chunk), 0.0}, cfg, scratch,
                      out.wavefronts[1]);
    }
  }
  return out;
}

double fused_ratio(const FusedSchedule& sched) {
  if (sched.n < 1 || sched.wavefronts.empty()) return 0.0;
  std::size_t fused = 0;
  for (const auto& tile : sched.wavefronts[0]) fused += tile.j_rows.size();
  return static_cast<double>(fused) / (2.0 * static_cast<double>(sched.n));
}

ValidationReport validate_schedule(const SparsityView& a,
                                   const FusedSchedule& sched,
                                   const SchedulerConfig& cfg) {
  ValidationReport report;
  auto fail = [&report](std::string what) {
    report.pass = false;
    report.violations.push_back(std::move(what));
  };

  if (!a.square()) fail("matrix is not square");
  const index_t n = a.n_rows;
  if (sched.n != n) fail("schedule n does not match matrix");
  if (sched.wavefronts.size() != 2) {
    fail("expected exactly 2 wavefronts, got " +
         std::to_string(sched.wavefronts.size()));
    return report;
  }
  if (!a.square() || sched.n != n) return report;

  // Wavefront-0 i_ranges partition [0, n).
  std::vector<std::pair<index_t, index_t>> ranges;
  ranges.reserve(sched.wavefronts[0].size());
  for (const auto& tile : sched.wavefronts[0]) {
    if (tile.i_lo >= tile.i_hi) {
      fail("wavefront-0 tile with empty i_range [" +
           std::to_string(tile.i_lo) + "," + std::to_string(tile.i_hi) + ")");
      continue;
    }
    if (tile.i_lo < 0 || tile.i_hi > n) {
      fail("i_range out of bounds");
      continue;
    }
    ranges.emplace_back(tile.i_lo, tile.i_hi);
  }
  std::sort(ranges.begin(), ranges.end());
  index_t expect = 0;
  bool contiguous = true;
  for (const auto& [lo, hi] : ranges) {
    if (lo != expect) {
      fail("i coverage gap or overlap at " + std::to_string(lo) +
           " (expected " + std::to_string(expect) + ")");
      contiguous = false;
      break;
    }
    expect = hi;
  }
  if (contiguous && !ranges.empty() && expect != n)
    fail("i coverage stops at " + std::to_string(expect));
  if (ranges.empty() && n > 0) fail("wavefront 0 covers nothing");

  for (const auto& tile : sched.wavefronts[1])
    if (tile.i_lo != tile.i_hi) {
      fail("wavefront-1 tile carries a nonempty i_range");
      break;
    }

  // j_lists partition [0, n).
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::size_t seen_count = 0;
  for (std::size_t w = 0; w < 2; ++w) {
    for (const auto& tile : sched.wavefronts[w]) {
      index_t prev = -1;
      for (const index_t j : tile.j_rows) {
        if (j < 0 || j >= n) {
          fail("j out of range: " + std::to_string(j));
          continue;
        }
        if (j <= prev) fail("j_list not strictly ascending");
        prev = j;
        if (seen[static_cast<std::size_t>(j)]) {
          fail("j appears twice: " + std::to_string(j));
        } else {
          seen[static_cast<std::size_t>(j)] = 1;
          ++seen_count;
        }
      }
    }
  }
  if (seen_count != static_cast<std::size_t>(n))
    fail("j coverage incomplete: " + std::to_string(seen_count) + " of " +
         std::to_string(n));

  // Dependence closure for fused rows.
  for (const auto& tile : sched.wavefronts[0]) {
    bool tile_ok = true;
    for (const index_t j : tile.j_rows) {
      if (!tile_ok) break;
      for (const index_t col : a.row_cols(j)) {
        if (col < tile.i_lo || col >= tile.i_hi) {
          fail("row " + std::to_string(j) + " fused into [" +
               std::to_string(tile.i_lo) + "," + std::to_string(tile.i_hi) +
               ") but depends on " + std::to_string(col));
          tile_ok = false;
          break;
        }
      }
    }
  }

  // Cost bound, exempting tiles that cannot split further.
  {
    CostScratch scratch(n);
    const double budget = static_cast<double>(cfg.cache_size_words);
    for (std::size_t w = 0; w < 2; ++w) {
      for (const auto& tile : sched.wavefronts[w]) {
        const double cost = tile_cost_ws(a, tile, cfg, scratch);
        if (cost <= budget) continue;
        const bool irreducible =
            w == 0 ? tile.width() <= 1 : tile.j_rows.size() <= 1;
        if (irreducible)
          ++report.over_budget_width1;
        else
          fail("splittable tile exceeds cache budget (cost " +
               std::to_string(cost) + ")");
      }
    }
  }

  // Load balance: enough tiles per wavefront for the worker pool.
  const auto p = static_cast<std::size_t>(cfg.num_workers);
  if (sched.tile_size < 1) {
    fail("tile_size must be >= 1");
  } else {
    const auto avail0 =
        static_cast<std::size_t>(ceil_div(n, sched.tile_size));
    if (sched.wavefronts[0].size() < std::min(p, avail0))
      fail("wavefront 0 has too few tiles for " + std::to_string(p) +
           " workers");
  }
  std::size_t w1_rows = 0;
  for (const auto& tile : sched.wavefronts[1]) w1_rows += tile.j_rows.size();
  if (sched.wavefronts[1].size() < std::min(p, w1_rows))
    fail("wavefront 1 has too few tiles for " + std::to_string(p) +
         " workers");

  return report;
}

}  // namespace tilefuse
