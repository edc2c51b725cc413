#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <tuple>
#include <vector>

#include "spmk/csr.hpp"
#include "spmk/error.hpp"
#include "spmk/kernels.hpp"

namespace spmk {

struct SelectorThresholds {
  std::size_t n_parallel_max = 4;  // widest N still using parallel-reduction
  double t_parallel_avg = 32.0;    // avg_row threshold in the parallel branch
  double t_cv = 1.0;               // stdv_row/avg_row threshold, sequential branch

  bool operator==(const SelectorThresholds&) const = default;
};

/// Decision tree mapping (features, N) to a kernel family.
///   N <= n_parallel_max -> parallel branch: balance iff avg_row < t_parallel_avg
///   otherwise           -> sequential branch: balance iff cv > t_cv
/// Ties at the thresholds favor the lower-overhead row-split kernels.
inline KernelId select_kernel(const MatrixFeatures& f, std::size_t n,
                              const SelectorThresholds& t = {}) {
  if (n <= t.n_parallel_max) {
    return f.avg_row < t.t_parallel_avg ? kParBalanced : kParRowSplit;
  }
  return f.cv > t.t_cv ? kSeqBalanced : kSeqRowSplit;
}

struct CalibrationRecord {
  MatrixFeatures features;
  std::size_t n = 0;
  KernelId kernel = kSeqRowSplit;
  double gflops = 0.0;
};

namespace detail {

struct CalibrationCell {
  MatrixFeatures features;
  std::size_t n = 0;
  std::array<double, 4> gflops{-1.0, -1.0, -1.0, -1.0};
};

inline double calibration_loss(const std::vector<CalibrationCell>& cells,
                               const SelectorThresholds& t) {
  double total = 0.0;
  for (const auto& cell : cells) {
    double best = 0.0;
    for (double g : cell.gflops) best = std::max(best, g);
    const KernelId chosen = select_kernel(cell.features, cell.n, t);
    const double g = cell.gflops[kernel_index(chosen)];
    if (g < 0.0) {
      throw Error("calibration records lack kernel " + kernel_name(chosen) +
                  " for a (matrix, n) cell with n=" + std::to_string(cell.n));
    }
    if (best > 0.0) total += std::max(0.0, 1.0 - g / best);
  }
  return total / static_cast<double>(cells.size());
}

}  // namespace detail

/// Grid search over the two continuous thresholds, minimizing mean
/// performance loss against the per-cell best kernel. Ties break toward
/// the default values.
inline SelectorThresholds calibrate_thresholds(
    const std::vector<CalibrationRecord>& records) {
  if (records.empty()) throw Error("calibrate_thresholds: empty record list");

  using Key = std::tuple<Index, Index, double, double, std::size_t>;
  std::map<Key, detail::CalibrationCell> grouped;
  for (const auto& r : records) {
    Key key{r.features.num_rows, r.features.nnz, r.features.avg_row,
            r.features.stdv_row, r.n};
    auto& cell = grouped[key];
    cell.features = r.features;
    cell.n = r.n;
    cell.gflops[kernel_index(r.kernel)] = r.gflops;
  }
  std::vector<detail::CalibrationCell> cells;
  cells.reserve(grouped.size());
  for (auto& [key, cell] : grouped) {
    int covered = 0;
    for (double g : cell.gflops) covered += g >= 0.0;
    if (covered < 2) {
      throw Error("calibration requires >= 2 kernels per (matrix, n) pair");
    }
    cells.push_back(cell);
  }

  static constexpr std::array<double, 5> kAvgGrid{8, 16, 32, 64, 128};
  static constexpr std::array<double, 5> kCvGrid{0.25, 0.5, 1.0, 2.0, 4.0};
  const SelectorThresholds defaults;

  SelectorThresholds best = defaults;
  double best_loss = detail::calibration_loss(cells, defaults);
  double best_dist = 0.0;
  for (double tp : kAvgGrid) {
    for (double tc : kCvGrid) {
      SelectorThresholds cand{defaults.n_parallel_max, tp, tc};
      const double loss = detail::calibration_loss(cells, cand);
      const double dist = std::abs(std::log2(tp / defaults.t_parallel_avg)) +
                          std::abs(std::log2(tc / defaults.t_cv));
      if (loss < best_loss - 1e-12 ||
          (loss < best_loss + 1e-12 && dist < best_dist)) {
        best = cand;
        best_loss = loss;
        best_dist = dist;
      }
    }
  }
  return best;
}

}  // namespace spmk
