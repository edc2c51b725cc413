#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "spmk/csr.hpp"
#include "spmk/error.hpp"
#include "spmk/reduction.hpp"
#include "spmk/thread_pool.hpp"

namespace spmk {

enum class Reduction { Parallel, Sequential };
enum class Balancing { RowSplit, NonzeroSplit };

/// One of the four kernel families spanning the 2x2 design space.
struct KernelId {
  Reduction reduction;
  Balancing balancing;

  bool operator==(const KernelId&) const = default;
};

inline constexpr KernelId kParRowSplit{Reduction::Parallel,
                                       Balancing::RowSplit};
inline constexpr KernelId kParBalanced{Reduction::Parallel,
                                       Balancing::NonzeroSplit};
inline constexpr KernelId kSeqRowSplit{Reduction::Sequential,
                                       Balancing::RowSplit};
inline constexpr KernelId kSeqBalanced{Reduction::Sequential,
                                       Balancing::NonzeroSplit};

inline constexpr std::array<KernelId, 4> kAllKernels{
    kParRowSplit, kParBalanced, kSeqRowSplit, kSeqBalanced};

inline std::string kernel_name(KernelId id) {
  if (id == kParRowSplit) return "par-rs";
  if (id == kParBalanced) return "par-ws";
  if (id == kSeqRowSplit) return "seq-rs";
  return "seq-ws";
}

inline std::size_t kernel_index(KernelId id) {
  return (id.reduction == Reduction::Sequential ? 2u : 0u) +
         (id.balancing == Balancing::NonzeroSplit ? 1u : 0u);
}

inline KernelId parse_kernel(const std::string& name) {
  for (KernelId id : kAllKernels) {
    if (kernel_name(id) == name) return id;
  }
  throw Error("unknown kernel name: " + name);
}

/// Precomputed even-nonzero partition: the row of each nonzero (COO
/// expansion of row_ptr) plus fixed-size chunk boundaries.
struct BalancedPlan {
  std::vector<Index> elem_row;  // length nnz, non-decreasing
  Index chunk_size = 0;
  Index num_chunks = 0;
};

/// Lockstep operation counters, filled when KernelConfig::stats is set.
/// lane_multiplies counts lane-slot multiply positions (idle lanes of the
/// lockstep model included), summed over column components; scan_ops counts
/// lane-slot positions visited by scan levels.
struct KernelStats {
  std::atomic<std::uint64_t> lane_multiplies{0};
  std::atomic<std::uint64_t> scan_ops{0};

  void reset() {
    lane_multiplies = 0;
    scan_ops = 0;
  }
};

struct KernelConfig {
  std::size_t lane_width = 32;  // W, power of two in [2, 64]
  std::size_t vdl_group = 0;    // C in {1,2,4}; 0 = largest fitting N
  std::size_t seq_chunk = 256;  // nonzeros per unit for sequential balanced
  std::size_t worker_count = 0;  // 0 = available parallelism
  KernelStats* stats = nullptr;
};

namespace detail {

inline void check_config(const KernelConfig& cfg) {
  if (!is_pow2(cfg.lane_width) || cfg.lane_width < 2 || cfg.lane_width > 64) {
    throw Error("lane_width must be a power of two in [2, 64]");
  }
  if (cfg.vdl_group != 0 && cfg.vdl_group != 1 && cfg.vdl_group != 2 &&
      cfg.vdl_group != 4) {
    throw Error("vdl_group must be 0 (auto), 1, 2 or 4");
  }
  if (cfg.seq_chunk < 1) throw Error("seq_chunk must be >= 1");
}

template <typename T>
void check_dims(const CsrMatrix<T>& a, const DenseMatrix<T>& x) {
  if (a.num_cols != x.num_rows) {
    throw Error("dimension mismatch: A is " + std::to_string(a.num_rows) +
                "x" + std::to_string(a.num_cols) + ", X has " +
                std::to_string(x.num_rows) + " rows");
  }
}

inline std::size_t effective_workers(const KernelConfig& cfg) {
  return cfg.worker_count == 0 ? ThreadPool::default_workers()
                               : cfg.worker_count;
}

inline Index effective_group(const KernelConfig& cfg, Index n) {
  if (cfg.vdl_group != 0) return static_cast<Index>(cfg.vdl_group);
  if (n >= 4) return 4;
  if (n >= 2) return 2;
  return 1;
}

/// Static contiguous partition of [0, items) into `parts` ranges.
inline std::pair<Index, Index> partition(Index items, std::size_t parts,
                                         std::size_t w) {
  Index lo = items * static_cast<Index>(w) / static_cast<Index>(parts);
  Index hi = items * static_cast<Index>(w + 1) / static_cast<Index>(parts);
  return {lo, hi};
}

}  // namespace detail

inline BalancedPlan plan_balanced(Index nnz, const std::vector<Index>& row_ptr,
                                  Index num_rows, Index chunk_size) {
  if (chunk_size < 1) throw Error("chunk_size must be >= 1");
  BalancedPlan plan;
  plan.chunk_size = chunk_size;
  plan.elem_row.resize(nnz);
  for (Index i = 0; i < num_rows; ++i) {
    for (Index e = row_ptr[i]; e < row_ptr[i + 1]; ++e) plan.elem_row[e] = i;
  }
  plan.num_chunks = (nnz + chunk_size - 1) / chunk_size;
  return plan;
}

template <typename T>
BalancedPlan plan_balanced(const CsrMatrix<T>& a, Index chunk_size) {
  return plan_balanced(a.nnz(), a.row_ptr, a.num_rows, chunk_size);
}

// ---------------------------------------------------------------------------
// Parallel-reduction, row-split (CSR-Vector generalized to SpMM via VDL).
// One lane group of width W per row: lanes stride over the row's nonzeros,
// each lane multiplying its nonzero against a C-wide group of dense-row
// elements, then a merge-tree scan reduces across lanes.
// ---------------------------------------------------------------------------
template <typename T>
DenseMatrix<T> spmm_par_rowsplit(const CsrMatrix<T>& a, const DenseMatrix<T>& x,
                                 const KernelConfig& cfg = {}) {
  detail::check_config(cfg);
  detail::check_dims(a, x);
  const Index w = static_cast<Index>(cfg.lane_width);
  const Index n = x.num_cols;
  DenseMatrix<T> y = DenseMatrix<T>::zero(a.num_rows, n);
  if (n == 0) return y;
  const Index group = std::min<Index>(detail::effective_group(cfg, n), n);
  const std::size_t workers = detail::effective_workers(cfg);

  // scan_ops bookkeeping stays in lockstep-model units: log2(W) levels of
  // W*C lane slots per row group, independent of how the merge is evaluated.
  Index scan_levels = 0;
  for (Index offset = 1; offset < w; offset <<= 1) ++scan_levels;

  auto reduce_row_group = [&](Index i, Index n0, Index c, std::vector<T>& acc,
                              std::uint64_t& m, std::uint64_t& s) {
    std::fill(acc.begin(), acc.begin() + w * c, T(0));
    const Index begin = a.row_ptr[i];
    const Index end = a.row_ptr[i + 1];
    for (Index base = begin; base < end; base += w) {
      const Index lanes = std::min<Index>(w, end - base);
      for (Index l = 0; l < lanes; ++l) {
        const T v = a.values[base + l];
        const T* xr = x.row(a.col_idx[base + l]) + n0;
        T* al = acc.data() + l * c;
        for (Index cc = 0; cc < c; ++cc) al[cc] += v * xr[cc];
      }
      m += static_cast<std::uint64_t>(w * c);  // lockstep: idle lanes count
    }
    // Merge across lanes. With all-equal row indices the scan network's last
    // lane expands to the balanced pairwise tree (higher lane + lower lane at
    // every pairing), so evaluate that tree directly: same summation order,
    // W-1 additions per component instead of W*log2(W).
    for (Index len = w; len > 1; len >>= 1) {
      for (Index l = 0; l < len / 2; ++l) {
        for (Index cc = 0; cc < c; ++cc) {
          acc[l * c + cc] = acc[(2 * l + 1) * c + cc] + acc[2 * l * c + cc];
        }
      }
    }
    s += static_cast<std::uint64_t>(scan_levels) *
         static_cast<std::uint64_t>(w * c);
    T* yr = y.row(i) + n0;
    for (Index cc = 0; cc < c; ++cc) yr[cc] = acc[cc];
  };

  ThreadPool::instance().run(workers, workers, [&](std::size_t wk) {
    auto [lo, hi] = detail::partition(a.num_rows, workers, wk);
    std::vector<T> acc(w * group);
    std::uint64_t m = 0, s = 0;
    for (Index i = lo; i < hi; ++i) {
      if (a.row_ptr[i] == a.row_ptr[i + 1]) continue;
      Index n0 = 0;
      for (; n0 + group <= n; n0 += group) {
        reduce_row_group(i, n0, group, acc, m, s);
      }
      for (; n0 < n; ++n0) reduce_row_group(i, n0, 1, acc, m, s);
    }
    if (cfg.stats) {
      cfg.stats->lane_multiplies.fetch_add(m);
      cfg.stats->scan_ops.fetch_add(s);
    }
  });
  return y;
}

// ---------------------------------------------------------------------------
// Parallel-reduction, nonzero-split (VSR). Nonzeros are partitioned into
// chunks of W; each chunk runs the vectorized segmented scan network,
// complete rows are written directly, and boundary partials are folded in
// serially in ascending chunk order (deterministic merge).
// ---------------------------------------------------------------------------
template <typename T>
DenseMatrix<T> spmm_par_balanced(const CsrMatrix<T>& a, const DenseMatrix<T>& x,
                                 const KernelConfig& cfg = {}) {
  detail::check_config(cfg);
  detail::check_dims(a, x);
  const Index w = static_cast<Index>(cfg.lane_width);
  const Index n = x.num_cols;
  const Index nnz = a.nnz();
  DenseMatrix<T> y = DenseMatrix<T>::zero(a.num_rows, n);
  if (nnz == 0 || n == 0) return y;

  const Index group = std::min<Index>(detail::effective_group(cfg, n), n);
  const BalancedPlan plan = plan_balanced(a, w);
  const Index chunks = plan.num_chunks;
  const std::size_t workers = detail::effective_workers(cfg);

  struct Boundary {
    Index row = -1;
    std::array<T, 4> vals{};
  };
  std::vector<Boundary> head(chunks), tail(chunks);
  Index scan_levels = 0;
  for (Index offset = 1; offset < w; offset <<= 1) ++scan_levels;

  auto run_group = [&](Index n0, Index c) {
    for (Index q = 0; q < chunks; ++q) {
      head[q].row = -1;
      tail[q].row = -1;
    }
    ThreadPool::instance().run(workers, workers, [&](std::size_t wk) {
      auto [qlo, qhi] = detail::partition(chunks, workers, wk);
      std::vector<Index> rows(w);
      std::vector<T> vals(w * c);
      std::uint64_t m = 0, s = 0;
      for (Index q = qlo; q < qhi; ++q) {
        const Index e0 = q * w;
        const Index e1 = std::min(e0 + w, nnz);
        const Index real = e1 - e0;
        bool any_run = false;
        for (Index l = 0; l < real; ++l) {
          const Index e = e0 + l;
          rows[l] = plan.elem_row[e];
          any_run |= l > 0 && rows[l] == rows[l - 1];
          const T v = a.values[e];
          const T* xr = x.row(a.col_idx[e]) + n0;
          for (Index cc = 0; cc < c; ++cc) vals[l * c + cc] = v * xr[cc];
        }
        for (Index l = real; l < w; ++l) {
          rows[l] = kPadRow;
          for (Index cc = 0; cc < c; ++cc) vals[l * c + cc] = T(0);
        }
        m += static_cast<std::uint64_t>(w * c);
        s += static_cast<std::uint64_t>(scan_levels) *
             static_cast<std::uint64_t>(w * c);

        // Conditional scan, lockstep semantics (runs are contiguous, so a
        // chunk with no adjacent equal pair has nothing to add). Top-down
        // lane order reads pre-level values in place.
        if (any_run) {
          detail::conditional_scan_inplace(rows.data(), vals.data(),
                                           std::size_t(w), std::size_t(c));
        }

        // Dump: last lane of each equal-row run.
        for (Index l = 0; l < w; ++l) {
          if (l + 1 < w && rows[l + 1] == rows[l]) continue;
          const Index r = rows[l];
          if (r == kPadRow) continue;
          const bool complete = a.row_ptr[r] >= e0 && a.row_ptr[r + 1] <= e1;
          if (complete) {
            T* yr = y.row(r) + n0;
            for (Index cc = 0; cc < c; ++cc) yr[cc] = vals[l * c + cc];
          } else {
            Boundary& b = a.row_ptr[r] < e0 ? head[q] : tail[q];
            b.row = r;
            for (Index cc = 0; cc < c; ++cc) b.vals[cc] = vals[l * c + cc];
          }
        }
      }
      if (cfg.stats) {
        cfg.stats->lane_multiplies.fetch_add(m);
        cfg.stats->scan_ops.fetch_add(s);
      }
    });
    // Serial boundary merge, ascending chunk order.
    for (Index q = 0; q < chunks; ++q) {
      for (const Boundary* b : {&head[q], &tail[q]}) {
        if (b->row < 0) continue;
        T* yr = y.row(b->row) + n0;
        for (Index cc = 0; cc < c; ++cc) yr[cc] += b->vals[cc];
      }
    }
  };

  Index n0 = 0;
  for (; n0 + group <= n; n0 += group) run_group(n0, group);
  for (; n0 < n; ++n0) run_group(n0, 1);
  return y;
}

// ---------------------------------------------------------------------------
// Sequential-reduction, row-split with coalesced sparse-row caching: rows go
// to workers; per row, nonzeros are staged in tiles of W into a local buffer
// (the scratchpad analog), then swept in order into N per-column
// accumulators. Accumulation order is ascending-nonzero, so the output is
// bit-equal to a plain sequential row loop.
// ---------------------------------------------------------------------------
template <typename T>
DenseMatrix<T> spmm_seq_rowsplit(const CsrMatrix<T>& a, const DenseMatrix<T>& x,
                                 const KernelConfig& cfg = {}) {
  detail::check_config(cfg);
  detail::check_dims(a, x);
  const Index w = static_cast<Index>(cfg.lane_width);
  const Index n = x.num_cols;
  DenseMatrix<T> y = DenseMatrix<T>::zero(a.num_rows, n);
  if (n == 0) return y;
  const std::size_t workers = detail::effective_workers(cfg);

  ThreadPool::instance().run(workers, workers, [&](std::size_t wk) {
    auto [lo, hi] = detail::partition(a.num_rows, workers, wk);
    std::vector<Index> tile_col(w);
    std::vector<T> tile_val(w);
    std::vector<T> acc(n);
    for (Index i = lo; i < hi; ++i) {
      const Index begin = a.row_ptr[i];
      const Index end = a.row_ptr[i + 1];
      if (begin == end) continue;
      std::fill(acc.begin(), acc.end(), T(0));
      for (Index t = begin; t < end; t += w) {
        const Index tl = std::min<Index>(w, end - t);
        for (Index j = 0; j < tl; ++j) {
          tile_col[j] = a.col_idx[t + j];
          tile_val[j] = a.values[t + j];
        }
        for (Index j = 0; j < tl; ++j) {
          const T v = tile_val[j];
          const T* xr = x.row(tile_col[j]);
          for (Index jj = 0; jj < n; ++jj) acc[jj] += v * xr[jj];
        }
      }
      std::copy(acc.begin(), acc.end(), y.row(i));
    }
  });
  return y;
}

// ---------------------------------------------------------------------------
// Sequential-reduction, nonzero-split. Chunks of seq_chunk nonzeros go to
// workers; each chunk is swept with tile staging, flushing the accumulator
// row whenever the element row changes. Rows spanning a chunk boundary are
// emitted as partials and folded in serially in ascending chunk order.
// ---------------------------------------------------------------------------
template <typename T>
DenseMatrix<T> spmm_seq_balanced(const CsrMatrix<T>& a, const DenseMatrix<T>& x,
                                 const KernelConfig& cfg = {}) {
  detail::check_config(cfg);
  detail::check_dims(a, x);
  const Index w = static_cast<Index>(cfg.lane_width);
  const Index n = x.num_cols;
  const Index nnz = a.nnz();
  DenseMatrix<T> y = DenseMatrix<T>::zero(a.num_rows, n);
  if (nnz == 0 || n == 0) return y;

  const Index chunk_size = static_cast<Index>(cfg.seq_chunk);
  const BalancedPlan plan = plan_balanced(a, chunk_size);
  const Index chunks = plan.num_chunks;
  const std::size_t workers = detail::effective_workers(cfg);

  // Up to two boundary rows per chunk: slot 0 spans the left edge, slot 1
  // continues past the right edge.
  std::vector<Index> brow(2 * chunks, -1);
  std::vector<T> bvals(static_cast<std::size_t>(2 * chunks) * n, T(0));

  ThreadPool::instance().run(workers, workers, [&](std::size_t wk) {
    auto [qlo, qhi] = detail::partition(chunks, workers, wk);
    std::vector<Index> tile_row(w), tile_col(w);
    std::vector<T> tile_val(w);
    std::vector<T> acc(n);
    for (Index q = qlo; q < qhi; ++q) {
      const Index e0 = q * chunk_size;
      const Index e1 = std::min(e0 + chunk_size, nnz);
      Index cur = plan.elem_row[e0];
      std::fill(acc.begin(), acc.end(), T(0));
      auto flush = [&](Index r) {
        const bool complete = a.row_ptr[r] >= e0 && a.row_ptr[r + 1] <= e1;
        if (complete) {
          std::copy(acc.begin(), acc.end(), y.row(r));
        } else {
          const Index slot = 2 * q + (a.row_ptr[r] < e0 ? 0 : 1);
          brow[slot] = r;
          std::copy(acc.begin(), acc.end(),
                    bvals.begin() + static_cast<std::size_t>(slot) * n);
        }
      };
      for (Index t = e0; t < e1; t += w) {
        const Index tl = std::min<Index>(w, e1 - t);
        for (Index j = 0; j < tl; ++j) {
          tile_row[j] = plan.elem_row[t + j];
          tile_col[j] = a.col_idx[t + j];
          tile_val[j] = a.values[t + j];
        }
        for (Index j = 0; j < tl; ++j) {
          if (tile_row[j] != cur) {
            flush(cur);
            std::fill(acc.begin(), acc.end(), T(0));
            cur = tile_row[j];
          }
          const T v = tile_val[j];
          const T* xr = x.row(tile_col[j]);
          for (Index jj = 0; jj < n; ++jj) acc[jj] += v * xr[jj];
        }
      }
      flush(cur);
    }
  });

  for (Index slot = 0; slot < 2 * chunks; ++slot) {
    if (brow[slot] < 0) continue;
    T* yr = y.row(brow[slot]);
    const T* bv = bvals.data() + static_cast<std::size_t>(slot) * n;
    for (Index jj = 0; jj < n; ++jj) yr[jj] += bv[jj];
  }
  return y;
}

template <typename T>
DenseMatrix<T> spmm(KernelId id, const CsrMatrix<T>& a, const DenseMatrix<T>& x,
                    const KernelConfig& cfg = {}) {
  if (id == kParRowSplit) return spmm_par_rowsplit(a, x, cfg);
  if (id == kParBalanced) return spmm_par_balanced(a, x, cfg);
  if (id == kSeqRowSplit) return spmm_seq_rowsplit(a, x, cfg);
  return spmm_seq_balanced(a, x, cfg);
}

/// Element tolerance for kernel-vs-oracle comparison. Summation-order
/// differences grow with the depth of the reduction tree.
template <typename T>
double kernel_tolerance(Index max_row_nnz) {
  const double eps = sizeof(T) == 4 ? 1e-5 : 1e-12;
  return eps * std::log2(static_cast<double>(max_row_nnz) + 2.0);
}

}  // namespace spmk
