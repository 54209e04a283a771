#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tilefuse/csr.hpp"

namespace tilefuse {

/// Inputs to schedule construction for D = A * (B * C).
/// The fused loop nest iterates rows of B (first op) and rows of A
/// (second op); A's sparsity decides which second-op rows can join a tile.
struct SchedulerConfig {
  index_t ct_size = 2048;       // coarse tile width heuristic
  int num_workers = 1;          // p
  std::size_t cache_size_words = 160 * 1024;  // per-core budget, in scalars
  index_t b_cols = 32;          // columns of B when B is dense
  index_t c_cols = 32;          // columns of C (dense operand)
  double index_to_scalar_ratio = 0.5;  // index word / scalar word
  bool b_is_dense = true;       // GeMM-SpMM when true, SpMM-SpMM when false
  bool whole_b_cost = false;    // charge all of B instead of a tile slice
};

/// One fused tile: first-op rows [i_lo, i_hi) plus the second-op rows whose
/// A-row column indices all fall inside [i_lo, i_hi).
struct FusedTile {
  index_t i_lo = 0;
  index_t i_hi = 0;
  std::vector<index_t> j_rows;
  double cost = 0.0;

  index_t width() const { return i_hi - i_lo; }
};

/// Two-wavefront schedule. wavefronts[0] carries tiles with both loops;
/// wavefronts[1] carries the second-op rows left over, rebalanced into
/// chunks (their i_range is empty).
struct FusedSchedule {
  index_t n = 0;
  index_t tile_size = 0;
  std::vector<std::vector<FusedTile>> wavefronts;

  std::size_t num_tiles() const {
    std::size_t k = 0;
    for (const auto& w : wavefronts) k += w.size();
    return k;
  }
};

/// Step-1 output before cost-model splitting.
struct IntermediateSchedule {
  index_t n = 0;
  index_t tile_size = 0;
  std::vector<FusedTile> tiles;        // uniform coverage of [0, n)
  std::vector<index_t> unfused_rows;   // ascending
};

struct ValidationReport {
  bool pass = true;
  std::vector<std::string> violations;
  // Width-1 tiles allowed to exceed the cache budget (irreducible).
  std::size_t over_budget_width1 = 0;
};

index_t choose_tile_size(index_t n, int num_workers, index_t ct_size);

/// Uniform tiles of width `tile_size`; row j fuses into tile k iff every
/// column of A's row j lies in [k*t, min((k+1)*t, n)). Empty rows fuse into
/// the tile containing index j. O(nnz + n).
IntermediateSchedule step1_coarse_fuse(const SparsityView& a,
                                       index_t tile_size);

/// Splits `rows` into num_chunks contiguous chunks (trailing ones may be
/// empty), greedily filling each to the running ideal ceil(rem weight /
/// rem chunks) with weight(j) = row_weight[j]. min(num_chunks, |rows|)
/// chunks come back nonempty; a chunk overshoots the ideal only when its
/// mandatory first row alone does.
std::vector<std::vector<index_t>> balance(
    const std::vector<index_t>& rows,
    const std::vector<index_t>& row_weight, std::size_t num_chunks);

/// Memory footprint of one tile in scalar words: the touched slices of
/// B, D1 and D plus A's scalar and index data for the tile's rows.
double tile_cost(const SparsityView& a, const FusedTile& tile,
                 const SchedulerConfig& cfg);

struct SplitResult {
  std::vector<FusedTile> pieces;       // cost-bounded or width 1
  std::vector<index_t> demoted_rows;   // rows evicted while splitting
};

/// Recursive bisection of `tile` until each piece fits the cache budget or
/// has width 1. Rows whose in-edges straddle a cut are demoted.
SplitResult split_tile(const SparsityView& a, FusedTile tile,
                       const SchedulerConfig& cfg);

/// Full pipeline: choose_tile_size, step 1, per-tile splitting, then
/// balance() over both wavefronts.
FusedSchedule build_schedule(const SparsityView& a,
                             const SchedulerConfig& cfg);

/// Fraction of row computations fused: |w0 second-op rows| / (2n).
double fused_ratio(const FusedSchedule& sched);

/// Checks coverage, disjointness, containment of fused rows, cost bounds
/// and wavefront balance. Intended for tests and the CLI verify path.
ValidationReport validate_schedule(const SparsityView& a,
                                   const FusedSchedule& sched,
                                   const SchedulerConfig& cfg);

}  // namespace tilefuse
