#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "spmk/corpus.hpp"
#include "spmk/csr.hpp"
#include "spmk/error.hpp"
#include "spmk/kernels.hpp"
#include "spmk/selector.hpp"

namespace spmk {

struct BenchRecord {
  std::string matrix_name;
  Index num_rows = 0;
  Index num_cols = 0;
  Index nnz = 0;
  std::size_t n = 0;
  std::string kernel;         // concrete kernel name, also for the auto record
  double time_seconds = 0.0;  // median over repeats
  double gflops = 0.0;        // 2 * nnz * n / time / 1e9
  bool correct = true;        // vs oracle, within kernel tolerance
  bool selected_by_rule = false;
};

struct SelectionLossSummary {
  std::map<std::size_t, double> per_n_loss;
  std::map<std::string, double> single_kernel_loss;
};

namespace detail {

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

template <typename T>
bool matches_oracle(const DenseMatrix<T>& y, const DenseMatrix<double>& ref,
                    double tol) {
  if (y.num_rows != ref.num_rows || y.num_cols != ref.num_cols) return false;
  for (std::size_t i = 0; i < y.data.size(); ++i) {
    const double o = ref.data[i];
    const double d = std::abs(static_cast<double>(y.data[i]) - o);
    if (d > tol * std::max(1.0, std::abs(o))) return false;
  }
  return true;
}

}  // namespace detail

/// Times one kernel on one (matrix, n) cell: `warmup` discarded runs, then
/// `repeats` measured runs, median taken. The oracle check runs once,
/// outside the timed region.
template <typename T>
BenchRecord measure_kernel(const std::string& name, const CsrMatrix<T>& a,
                           const DenseMatrix<T>& x,
                           const DenseMatrix<double>& oracle, KernelId id,
                           const KernelConfig& cfg, std::size_t repeats,
                           std::size_t warmup) {
  if (repeats < 1) throw Error("repeats must be >= 1");
  using Clock = std::chrono::steady_clock;

  for (std::size_t i = 0; i < warmup; ++i) (void)spmm(id, a, x, cfg);
  std::vector<double> times;
  times.reserve(repeats);
  DenseMatrix<T> y;
  for (std::size_t i = 0; i < repeats; ++i) {
    const auto t0 = Clock::now();
    y = spmm(id, a, x, cfg);
    const auto t1 = Clock::now();
    times.push_back(std::chrono::duration<double>(t1 - t0).count());
  }

  BenchRecord rec;
  rec.matrix_name = name;
  rec.num_rows = a.num_rows;
  rec.num_cols = a.num_cols;
  rec.nnz = a.nnz();
  rec.n = static_cast<std::size_t>(x.num_cols);
  rec.kernel = kernel_name(id);
  rec.time_seconds = std::max(detail::median(times), 1e-9);
  rec.gflops = 2.0 * static_cast<double>(rec.nnz) *
               static_cast<double>(rec.n) / rec.time_seconds / 1e9;
  rec.correct =
      detail::matches_oracle(y, oracle, kernel_tolerance<T>(a.max_row_nnz()));
  return rec;
}

/// Runs all four kernels plus the rule-selected kernel on every
/// (matrix, n) cell. A kernel/oracle mismatch flags the record and the
/// run continues.
template <typename T>
std::vector<BenchRecord> run_benchmark(
    const std::vector<NamedMatrix<T>>& corpus,
    const std::vector<std::size_t>& n_values, const KernelConfig& cfg = {},
    const SelectorThresholds& thresholds = {}, std::size_t repeats = 7,
    std::size_t warmup = 2) {
  if (corpus.empty()) throw Error("run_benchmark: empty corpus");
  if (repeats < 1) throw Error("run_benchmark: repeats must be >= 1");

  constexpr std::uint64_t kDenseSeed = 0x00D5EED;
  std::vector<BenchRecord> records;
  for (const auto& [name, a] : corpus) {
    const MatrixFeatures features = extract_features(a);
    for (std::size_t n : n_values) {
      const DenseMatrix<T> x =
          make_dense<T>(a.num_cols, static_cast<Index>(n), kDenseSeed + n);
      const DenseMatrix<double> oracle = oracle_spmm(a, x);
      for (KernelId id : kAllKernels) {
        records.push_back(
            measure_kernel(name, a, x, oracle, id, cfg, repeats, warmup));
      }
      const KernelId chosen = select_kernel(features, n, thresholds);
      BenchRecord auto_rec =
          measure_kernel(name, a, x, oracle, chosen, cfg, repeats, warmup);
      auto_rec.selected_by_rule = true;
      records.push_back(std::move(auto_rec));
    }
  }
  return records;
}

/// Mean performance loss of the rule-selected kernel against the per-cell
/// best of the four, and the loss of always choosing one fixed kernel.
inline SelectionLossSummary summarize_selection_loss(
    const std::vector<BenchRecord>& records) {
  struct Cell {
    std::array<double, 4> gflops{-1.0, -1.0, -1.0, -1.0};
    double auto_gflops = -1.0;
  };
  std::map<std::pair<std::string, std::size_t>, Cell> cells;
  for (const auto& r : records) {
    Cell& cell = cells[{r.matrix_name, r.n}];
    if (r.selected_by_rule) {
      cell.auto_gflops = r.gflops;
    } else {
      cell.gflops[kernel_index(parse_kernel(r.kernel))] = r.gflops;
    }
  }
  for (const auto& [key, cell] : cells) {
    for (std::size_t k = 0; k < 4; ++k) {
      if (cell.gflops[k] < 0.0) {
        throw Error("incomplete records: matrix '" + key.first +
                    "' n=" + std::to_string(key.second) + " lacks kernel " +
                    kernel_name(kAllKernels[k]));
      }
    }
    if (cell.auto_gflops < 0.0) {
      throw Error("incomplete records: matrix '" + key.first +
                  "' n=" + std::to_string(key.second) + " lacks the auto record");
    }
  }

  // Loss of one choice vs the best of four; empty-work cells (best == 0)
  // contribute zero loss. Clamped to [0, 1] against timing noise.
  auto loss = [](double g, double best) {
    if (best <= 0.0) return 0.0;
    return std::clamp(1.0 - g / best, 0.0, 1.0);
  };

  SelectionLossSummary summary;
  std::map<std::size_t, std::size_t> per_n_count;
  std::array<double, 4> kernel_loss_sum{};
  for (const auto& [key, cell] : cells) {
    const double best = *std::max_element(cell.gflops.begin(), cell.gflops.end());
    summary.per_n_loss[key.second] += loss(cell.auto_gflops, best);
    per_n_count[key.second] += 1;
    for (std::size_t k = 0; k < 4; ++k) {
      kernel_loss_sum[k] += loss(cell.gflops[k], best);
    }
  }
  for (auto& [n, total] : summary.per_n_loss) total /= per_n_count[n];
  for (std::size_t k = 0; k < 4; ++k) {
    summary.single_kernel_loss[kernel_name(kAllKernels[k])] =
        kernel_loss_sum[k] / static_cast<double>(cells.size());
  }
  return summary;
}

inline double mean_per_n_loss(const SelectionLossSummary& s) {
  if (s.per_n_loss.empty()) return 0.0;
  double total = 0.0;
  for (const auto& [n, l] : s.per_n_loss) total += l;
  return total / static_cast<double>(s.per_n_loss.size());
}

inline double min_single_kernel_loss(const SelectionLossSummary& s) {
  double best = 1.0;
  for (const auto& [k, l] : s.single_kernel_loss) best = std::min(best, l);
  return best;
}

/// One header line, one line per record, reals with 6 significant digits;
/// the summary is appended as #-prefixed comment lines.
inline void emit_csv(const std::vector<BenchRecord>& records,
                     const SelectionLossSummary& summary, std::ostream& out) {
  auto fmt = [](double v) {
    std::ostringstream ss;
    ss.precision(6);
    ss << v;
    return ss.str();
  };
  out << "matrix_name,num_rows,num_cols,nnz,n,kernel,time_seconds,gflops,"
         "correct,selected_by_rule\n";
  for (const auto& r : records) {
    out << r.matrix_name << "," << r.num_rows << "," << r.num_cols << ","
        << r.nnz << "," << r.n << "," << r.kernel << ","
        << fmt(r.time_seconds) << "," << fmt(r.gflops) << ","
        << (r.correct ? "true" : "false") << ","
        << (r.selected_by_rule ? "true" : "false") << "\n";
  }
  for (const auto& [n, l] : summary.per_n_loss) {
    out << "# per_n_loss n=" << n << " " << fmt(l) << "\n";
  }
  for (const auto& [k, l] : summary.single_kernel_loss) {
    out << "# single_kernel_loss " << k << " " << fmt(l) << "\n";
  }
  if (!out) throw Error("write failure on csv sink");
}

}  // namespace spmk
