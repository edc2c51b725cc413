#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "spmk/csr.hpp"
#include "spmk/error.hpp"

namespace spmk {

/// Sentinel row index for padded lanes in a short final chunk. Padded lanes
/// carry value 0 and are never emitted.
inline constexpr Index kPadRow = std::numeric_limits<Index>::max();

/// A fixed-width chunk of (row index, value) pairs — the lane-model analog
/// of a GPU warp holding one nonzero per thread. The vectorized variant
/// carries `comps` partial sums per lane (values laid out lane-major:
/// values[lane * comps + c]).
template <typename T>
struct LaneChunk {
  std::size_t width = 0;  // W, power of two, 2..64
  std::size_t comps = 1;  // C in {1, 2, 4}
  std::vector<Index> row_idx;  // length W
  std::vector<T> values;       // length W * comps
};

template <typename T>
struct SegmentEntry {
  Index row = 0;
  std::vector<T> partial;  // length C
};

template <typename T>
struct SegmentOutput {
  /// One entry per distinct row in the chunk, rows strictly increasing.
  std::vector<SegmentEntry<T>> entries;
  /// The entry for the chunk's first row, which may be a partial sum of a
  /// row spanning the left chunk boundary. The caller decides completeness
  /// of the first and last entries from global row extents.
  std::optional<SegmentEntry<T>> boundary_head;
};

namespace detail {

inline bool is_pow2(std::size_t x) { return x != 0 && (x & (x - 1)) == 0; }

template <typename T>
void check_chunk(const LaneChunk<T>& chunk) {
  if (!is_pow2(chunk.width) || chunk.width < 2 || chunk.width > 64) {
    throw Error("lane width must be a power of two in [2, 64]");
  }
  if (chunk.comps != 1 && chunk.comps != 2 && chunk.comps != 4) {
    throw Error("component count must be 1, 2 or 4");
  }
  if (chunk.row_idx.size() != chunk.width) {
    throw Error("row_idx length must equal width");
  }
  if (chunk.values.size() != chunk.width * chunk.comps) {
    throw Error("values length must equal width * comps");
  }
  for (std::size_t i = 1; i < chunk.width; ++i) {
    if (chunk.row_idx[i] < chunk.row_idx[i - 1]) {
      throw Error("row indices must be non-decreasing within a chunk");
    }
  }
}

/// In-place conditional scan over raw lane arrays with lockstep semantics:
/// at each offset level all lanes read the pre-level values, then all write.
/// Walking lanes top-down makes every read land on a value the current level
/// has not written yet, so no snapshot copy is needed.
template <typename T>
void conditional_scan_inplace(const Index* rows, T* vals, std::size_t width,
                              std::size_t comps) {
  for (std::size_t offset = 1; offset < width; offset <<= 1) {
    for (std::size_t i = width; i-- > offset;) {
      if (rows[i] == rows[i - offset]) {
        for (std::size_t c = 0; c < comps; ++c) {
          vals[i * comps + c] += vals[(i - offset) * comps + c];
        }
      }
    }
  }
}

}  // namespace detail

/// Inclusive forward scan where addition fires only when the two lanes'
/// row indices match. After the final level, the last lane of each
/// equal-row run holds that run's total.
template <typename T>
LaneChunk<T> conditional_scan(LaneChunk<T> chunk) {
  detail::check_chunk(chunk);
  detail::conditional_scan_inplace(chunk.row_idx.data(), chunk.values.data(),
                                   chunk.width, chunk.comps);
  return chunk;
}

/// Segmented reduction of one chunk: conditional scan, then lane i dumps
/// its (row, partial) iff it is the last lane of its equal-row run.
/// Padded lanes (kPadRow) are never emitted.
template <typename T>
SegmentOutput<T> segment_reduce_chunk_vec(const LaneChunk<T>& chunk,
                                          std::size_t c) {
  if (c != 1 && c != 2 && c != 4) {
    throw Error("vectorized reduction requires c in {1, 2, 4}, got " +
                std::to_string(c));
  }
  if (chunk.comps != c) {
    throw Error("chunk component count does not match requested c");
  }
  LaneChunk<T> scanned = conditional_scan(chunk);

  SegmentOutput<T> out;
  const std::size_t w = scanned.width;
  for (std::size_t i = 0; i < w; ++i) {
    const bool last_of_run =
        (i + 1 == w) || (scanned.row_idx[i + 1] != scanned.row_idx[i]);
    if (!last_of_run || scanned.row_idx[i] == kPadRow) continue;
    SegmentEntry<T> entry;
    entry.row = scanned.row_idx[i];
    entry.partial.assign(scanned.values.begin() + i * c,
                         scanned.values.begin() + (i + 1) * c);
    out.entries.push_back(std::move(entry));
  }
  if (!out.entries.empty()) out.boundary_head = out.entries.front();
  return out;
}

template <typename T>
SegmentOutput<T> segment_reduce_chunk(const LaneChunk<T>& chunk) {
  return segment_reduce_chunk_vec(chunk, 1);
}

}  // namespace spmk
