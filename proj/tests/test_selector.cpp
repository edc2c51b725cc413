#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "spmk/rmat.hpp"
#include "spmk/selector.hpp"

using namespace spmk;

namespace {

MatrixFeatures feats(double avg, double cv, Index rows = 1000) {
  MatrixFeatures f;
  f.avg_row = avg;
  f.cv = cv;
  f.stdv_row = cv * avg;
  f.num_rows = rows;
  f.nnz = Index(avg * double(rows));
  return f;
}

MatrixFeatures random_feats(SplitMix64& rng) {
  return feats(rng.next_unit() * 200.0, rng.next_unit() * 4.0,
               1 + Index(rng.next() % 10000));
}

}  // namespace

TEST_CASE("decision-tree examples with default thresholds") {
  CHECK(select_kernel(feats(5, 2.0), 1) == kParBalanced);
  CHECK(select_kernel(feats(100, 0.1), 128) == kSeqRowSplit);
  CHECK(select_kernel(feats(10, 3.0), 32) == kSeqBalanced);
  CHECK(select_kernel(feats(64, 0.5), 2) == kParRowSplit);
}

TEST_CASE("threshold ties favor row-split") {
  CHECK(select_kernel(feats(32.0, 0.5), 1) == kParRowSplit);
  CHECK(select_kernel(feats(10.0, 1.0), 32) == kSeqRowSplit);
}

TEST_CASE("branch partition follows n_parallel_max") {
  SplitMix64 rng(2);
  for (int i = 0; i < 500; ++i) {
    auto f = random_feats(rng);
    const std::size_t n = 1 + rng.next() % 256;
    auto id = select_kernel(f, n);
    if (n <= 4) {
      CHECK(id.reduction == Reduction::Parallel);
    } else {
      CHECK(id.reduction == Reduction::Sequential);
    }
    CHECK(select_kernel(f, n) == id);  // deterministic
  }
}

TEST_CASE("monotone in cv within the sequential branch") {
  SplitMix64 rng(3);
  for (int i = 0; i < 500; ++i) {
    auto f = random_feats(rng);
    const std::size_t n = 5 + rng.next() % 124;
    auto lo = f;
    auto hi = f;
    hi.cv = f.cv + rng.next_unit() * 3.0;
    if (select_kernel(lo, n).balancing == Balancing::NonzeroSplit) {
      CHECK(select_kernel(hi, n).balancing == Balancing::NonzeroSplit);
    }
  }
}

TEST_CASE("monotone in avg_row within the parallel branch") {
  SplitMix64 rng(4);
  for (int i = 0; i < 500; ++i) {
    auto f = random_feats(rng);
    const std::size_t n = 1 + rng.next() % 4;
    auto hi = f;
    hi.avg_row = f.avg_row + rng.next_unit() * 100.0;
    if (select_kernel(f, n).balancing == Balancing::RowSplit) {
      CHECK(select_kernel(hi, n).balancing == Balancing::RowSplit);
    }
  }
}

namespace {

void add_cell(std::vector<CalibrationRecord>& records, MatrixFeatures f,
              std::size_t n, std::array<double, 4> gflops) {
  for (std::size_t k = 0; k < 4; ++k) {
    records.push_back({f, n, kAllKernels[k], gflops[k]});
  }
}

}  // namespace

TEST_CASE("degenerate corpus forces t_cv to the smallest grid value") {
  // Balanced always wins, across cells whose cv values straddle every grid
  // threshold except 0.25; only t_cv=0.25 selects balanced everywhere.
  std::vector<CalibrationRecord> records;
  int cell = 0;
  for (double cv : {0.3, 0.7, 1.5, 3.0}) {
    add_cell(records, feats(40 + cell++, cv), 32, {1.0, 1.0, 1.0, 10.0});
  }
  auto t = calibrate_thresholds(records);
  CHECK(t.t_cv == 0.25);
  CHECK(t.t_parallel_avg == 32.0);  // irrelevant dimension stays at default
}

TEST_CASE("zero-loss corpus returns the defaults") {
  std::vector<CalibrationRecord> records;
  // Sequential branch: cv 0.2 -> seq-rs best; cv 2.5 -> seq-ws best.
  add_cell(records, feats(50, 0.2), 32, {1, 1, 10, 2});
  add_cell(records, feats(50, 2.5), 32, {1, 1, 2, 10});
  // Parallel branch: avg 5 -> par-ws best; avg 64 -> par-rs best.
  add_cell(records, feats(5, 1.0), 2, {2, 10, 1, 1});
  add_cell(records, feats(64, 1.0), 2, {10, 2, 1, 1});
  auto t = calibrate_thresholds(records);
  CHECK(t == SelectorThresholds{});
}

TEST_CASE("known crossover lands between the bracketing grid points") {
  std::vector<CalibrationRecord> records;
  int cell = 0;
  for (double cv : {0.4, 0.8, 1.2, 1.4}) {  // below crossover at 1.5
    add_cell(records, feats(30 + cell++, cv), 16, {1, 1, 10, 5});
  }
  for (double cv : {1.6, 1.9, 2.5, 3.5}) {  // above crossover
    add_cell(records, feats(30 + cell++, cv), 16, {1, 1, 5, 10});
  }
  auto t = calibrate_thresholds(records);
  CHECK((t.t_cv == 1.0 || t.t_cv == 2.0));
}

TEST_CASE("calibration never loses to the defaults") {
  SplitMix64 rng(9);
  std::vector<CalibrationRecord> records;
  for (int cell = 0; cell < 30; ++cell) {
    std::array<double, 4> g;
    for (auto& v : g) v = 0.5 + rng.next_unit() * 9.5;
    add_cell(records, random_feats(rng), 1 + rng.next() % 128, g);
  }
  auto t = calibrate_thresholds(records);
  auto loss_of = [&](const SelectorThresholds& th) {
    // Recompute mean loss directly from the records.
    double total = 0.0;
    int cells = 0;
    for (std::size_t i = 0; i < records.size(); i += 4) {
      double best = 0.0;
      for (std::size_t k = 0; k < 4; ++k) best = std::max(best, records[i + k].gflops);
      auto id = select_kernel(records[i].features, records[i].n, th);
      double g = 0.0;
      for (std::size_t k = 0; k < 4; ++k) {
        if (records[i + k].kernel == id) g = records[i + k].gflops;
      }
      total += 1.0 - g / best;
      ++cells;
    }
    return total / cells;
  };
  CHECK(loss_of(t) <= loss_of(SelectorThresholds{}) + 1e-12);
}

TEST_CASE("calibration input validation") {
  CHECK_THROWS_AS(calibrate_thresholds({}), Error);
  std::vector<CalibrationRecord> one_kernel{
      {feats(10, 1.0), 8, kSeqRowSplit, 1.0}};
  CHECK_THROWS_AS(calibrate_thresholds(one_kernel), Error);
}
