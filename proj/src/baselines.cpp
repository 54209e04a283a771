#include "tilefuse/baselines.hpp"

#include <algorithm>
#include <stdexcept>

namespace tilefuse {

namespace {

void require_square(const SparsityView& a, const char* who) {
  if (!a.square() || a.n_rows < 1)
    throw std::invalid_argument(std::string(who) +
                                ": matrix must be square and nonempty");
}

index_t chunk_bound(index_t n, int parts, int v) {
  return static_cast<index_t>((static_cast<std::int64_t>(n) * v) / parts);
}

}  // namespace

OverlappedSchedule build_overlapped(const SparsityView& a,
                                    int num_partitions) {
  require_square(a, "build_overlapped");
  const index_t n = a.n_rows;
  if (num_partitions < 1 || num_partitions > n)
    throw std::invalid_argument(
        "build_overlapped: need 1 <= num_partitions <= n");

  OverlappedSchedule sched;
  sched.n = n;
  sched.tiles.resize(static_cast<std::size_t>(num_partitions));
  std::vector<char> needed_anywhere(static_cast<std::size_t>(n), 0);
  for (int v = 0; v < num_partitions; ++v) {
    OverlappedTile& tile = sched.tiles[static_cast<std::size_t>(v)];
    tile.j_lo = chunk_bound(n, num_partitions, v);
    tile.j_hi = chunk_bound(n, num_partitions, v + 1);
    for (index_t j = tile.j_lo; j < tile.j_hi; ++j)
      for (const index_t col : a.row_cols(j))
        tile.needed_i.push_back(col);
    std::sort(tile.needed_i.begin(), tile.needed_i.end());
    tile.needed_i.erase(
        std::unique(tile.needed_i.begin(), tile.needed_i.end()),
        tile.needed_i.end());
    sched.total_needed += static_cast<std::int64_t>(tile.needed_i.size());
    for (const index_t i : tile.needed_i)
      needed_anywhere[static_cast<std::size_t>(i)] = 1;
  }
  std::int64_t distinct = 0;
  for (const char f : needed_anywhere) distinct += f;
  sched.replicated = sched.total_needed - distinct;
  return sched;
}

AtomicSchedule build_atomic(const SparsityView& a, int num_tiles) {
  require_square(a, "build_atomic");
  const index_t n = a.n_rows;
  if (num_tiles < 1)
    throw std::invalid_argument("build_atomic: need num_tiles >= 1");
  num_tiles = std::min<int>(num_tiles, n);

  AtomicSchedule sched;
  sched.n = n;
  std::vector<index_t> bounds(static_cast<std::size_t>(num_tiles) + 1);
  for (int v = 0; v <= num_tiles; ++v)
    bounds[static_cast<std::size_t>(v)] = chunk_bound(n, num_tiles, v);

  std::vector<AtomicTile> tiles(static_cast<std::size_t>(num_tiles));
  for (int v = 0; v < num_tiles; ++v) {
    tiles[static_cast<std::size_t>(v)].i_lo = bounds[v];
    tiles[static_cast<std::size_t>(v)].i_hi = bounds[v + 1];
  }

  // Split every row's nonzero range at the tile boundaries; each run of
  // columns inside one chunk becomes a slice owned by that chunk's tile.
  for (index_t j = 0; j < n; ++j) {
    index_t k = a.row_ptr[j];
    const index_t row_end = a.row_ptr[j + 1];
    while (k < row_end) {
      const index_t col = a.col_idx[k];
      const auto v = static_cast<std::size_t>(
          std::upper_bound(bounds.begin(), bounds.end(), col) -
          bounds.begin() - 1);
      const index_t hi_col = bounds[v + 1];
      index_t end = k + 1;
      while (end < row_end && a.col_idx[end] < hi_col) ++end;
      tiles[v].slices.push_back(AtomicSlice{j, k, end});
      k = end;
    }
  }
  sched.wavefronts.push_back(std::move(tiles));
  return sched;
}

}  // namespace tilefuse
