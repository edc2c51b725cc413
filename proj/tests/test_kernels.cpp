#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "spmk/corpus.hpp"
#include "spmk/kernels.hpp"
#include "spmk/rmat.hpp"

using namespace spmk;

namespace {

template <typename T>
bool close_to_oracle(const CsrMatrix<T>& a, const DenseMatrix<T>& y,
                     const DenseMatrix<double>& ref) {
  const double tol = kernel_tolerance<T>(a.max_row_nnz());
  for (std::size_t i = 0; i < y.data.size(); ++i) {
    const double o = ref.data[i];
    if (std::abs(double(y.data[i]) - o) > tol * std::max(1.0, std::abs(o))) {
      return false;
    }
  }
  return true;
}

CsrMatrix<double> two_by_two() {
  return csr_from_coo<double>({{0, 0, 1.0}, {1, 0, 2.0}, {1, 1, 3.0}}, 2, 2);
}

DenseMatrix<double> column(std::vector<double> v) {
  DenseMatrix<double> x = DenseMatrix<double>::zero(Index(v.size()), 1);
  x.data = std::move(v);
  return x;
}

}  // namespace

TEST_CASE("plan_balanced expands rows and counts chunks") {
  auto a = csr_from_coo<double>({{0, 0, 1.0}, {1, 0, 1.0}, {1, 1, 1.0}}, 2, 2);
  auto plan = plan_balanced(a, 2);
  CHECK(plan.elem_row == std::vector<Index>{0, 1, 1});
  CHECK(plan.num_chunks == 2);
}

TEST_CASE("plan_balanced on the empty matrix") {
  auto a = csr_from_coo<double>({}, 3, 3);
  auto plan = plan_balanced(a, 4);
  CHECK(plan.elem_row.empty());
  CHECK(plan.num_chunks == 0);
}

TEST_CASE("plan_balanced skips empty rows") {
  std::vector<Triple<double>> t;
  for (Index j = 0; j < 4; ++j) t.push_back({1, j, 1.0});
  auto a = csr_from_coo(std::move(t), 2, 4);
  auto plan = plan_balanced(a, 4);
  CHECK(plan.elem_row == std::vector<Index>{1, 1, 1, 1});
  CHECK(plan.num_chunks == 1);
}

TEST_CASE("all four kernels on the 2x2 hand example") {
  auto a = two_by_two();
  auto x = column({10.0, 20.0});
  for (KernelId id : kAllKernels) {
    CAPTURE(kernel_name(id));
    auto y = spmm(id, a, x);
    CHECK(y(0, 0) == 10.0);
    CHECK(y(1, 0) == 80.0);
  }
}

TEST_CASE("seq_rowsplit hand arithmetic with N=2") {
  auto a = two_by_two();
  DenseMatrix<double> x = DenseMatrix<double>::zero(2, 2);
  x(0, 0) = 10.0;
  x(0, 1) = 1.0;
  x(1, 0) = 20.0;
  x(1, 1) = 2.0;
  auto y = spmm_seq_rowsplit(a, x);
  auto ref = oracle_spmm(a, x);
  CHECK(y(0, 0) == 10.0);
  CHECK(y(0, 1) == 1.0);
  CHECK(y(1, 0) == 80.0);
  CHECK(y(1, 1) == 8.0);  // 2*1 + 3*2
  for (std::size_t i = 0; i < y.data.size(); ++i) {
    CHECK(y.data[i] == ref.data[i]);
  }
}

TEST_CASE("identity matrix passes X through bit-exactly") {
  std::vector<Triple<double>> t;
  for (Index i = 0; i < 4; ++i) t.push_back({i, i, 1.0});
  auto a = csr_from_coo(std::move(t), 4, 4);
  auto x = make_dense<double>(4, 8, 17);
  for (KernelId id : kAllKernels) {
    CAPTURE(kernel_name(id));
    auto y = spmm(id, a, x);
    CHECK(y.data == x.data);
  }
}

TEST_CASE("single 100-nonzero row crosses chunk boundaries") {
  std::vector<Triple<double>> t;
  for (Index j = 0; j < 100; ++j) t.push_back({0, j, 1.0});
  auto a = csr_from_coo(std::move(t), 1, 100);
  DenseMatrix<double> x = DenseMatrix<double>::zero(100, 1);
  x.data.assign(100, 1.0);
  auto y = spmm_par_balanced(a, x);
  CHECK(y(0, 0) == 100.0);
  auto y2 = spmm_seq_balanced(a, x, {.seq_chunk = 16});
  CHECK(y2(0, 0) == 100.0);
}

TEST_CASE("64 singleton rows produce no boundary partials") {
  std::vector<Triple<double>> t;
  for (Index i = 0; i < 64; ++i) t.push_back({i, i % 8, 1.0});
  auto a = csr_from_coo(std::move(t), 64, 8);
  auto x = make_dense<double>(8, 1, 5);
  auto oracle = oracle_spmm(a, x);
  auto y = spmm_par_balanced(a, x);
  CHECK(close_to_oracle(a, y, oracle));
}

TEST_CASE("33-nonzero row exercises the tile remainder") {
  std::vector<Triple<double>> t;
  for (Index j = 0; j < 33; ++j) t.push_back({0, j, 0.5 + double(j)});
  auto a = csr_from_coo(std::move(t), 1, 33);
  auto x = make_dense<double>(33, 4, 9);
  auto oracle = oracle_spmm(a, x);
  CHECK(close_to_oracle(a, spmm_seq_rowsplit(a, x), oracle));
}

TEST_CASE("seq_balanced splits a row across chunks") {
  auto a = two_by_two();
  auto x = column({10.0, 20.0});
  auto y = spmm_seq_balanced(a, x, {.seq_chunk = 2});
  CHECK(y(0, 0) == 10.0);
  CHECK(y(1, 0) == 80.0);
}

TEST_CASE("uniform 16x16 aligns chunks to whole rows") {
  std::vector<Triple<double>> t;
  for (Index i = 0; i < 16; ++i) {
    for (Index j = 0; j < 4; ++j) t.push_back({i, (i + j * 3) % 16, 1.0});
  }
  auto a = csr_from_coo(std::move(t), 16, 16);
  auto x = make_dense<double>(16, 1, 2);
  auto oracle = oracle_spmm(a, x);
  auto y = spmm_seq_balanced(a, x, {.seq_chunk = 16});
  CHECK(close_to_oracle(a, y, oracle));
}

TEST_CASE("four-way agreement with the oracle across N") {
  RmatParams p;
  p.scale = 8;
  p.edge_factor = 8;
  p.seed = 4;
  auto skewed = p;
  skewed.skew = {0.57, 0.19, 0.19, 0.05};
  skewed.seed = 5;
  std::vector<CsrMatrix<double>> mats{generate_rmat<double>(p),
                                      generate_rmat<double>(skewed)};
  for (const auto& a : mats) {
    auto oracle_cols = a.num_cols;
    for (std::size_t n : {1, 2, 3, 4, 5, 8, 16, 32}) {
      auto x = make_dense<double>(oracle_cols, Index(n), 100 + n);
      auto ref = oracle_spmm(a, x);
      for (KernelId id : kAllKernels) {
        CAPTURE(kernel_name(id));
        CAPTURE(n);
        CHECK(close_to_oracle(a, spmm(id, a, x), ref));
      }
    }
  }
}

TEST_CASE("four-way agreement in 32-bit mode") {
  RmatParams p;
  p.scale = 8;
  p.edge_factor = 8;
  p.skew = {0.57, 0.19, 0.19, 0.05};
  p.seed = 6;
  auto a = generate_rmat<float>(p);
  for (std::size_t n : {1, 4, 16}) {
    auto x = make_dense<float>(a.num_cols, Index(n), 200 + n);
    auto ref = oracle_spmm(a, x);
    for (KernelId id : kAllKernels) {
      CAPTURE(kernel_name(id));
      CHECK(close_to_oracle(a, spmm(id, a, x), ref));
    }
  }
}

TEST_CASE("VDL remainder loop handles N in {3, 5, 7}") {
  RmatParams p;
  p.scale = 7;
  p.edge_factor = 6;
  p.seed = 8;
  auto a = generate_rmat<double>(p);
  for (std::size_t n : {3, 5, 7}) {
    auto x = make_dense<double>(a.num_cols, Index(n), 300 + n);
    auto ref = oracle_spmm(a, x);
    CHECK(close_to_oracle(a, spmm_par_rowsplit(a, x), ref));
    CHECK(close_to_oracle(a, spmm_par_balanced(a, x), ref));
  }
}

TEST_CASE("kernels are deterministic across runs and worker counts") {
  RmatParams p;
  p.scale = 9;
  p.edge_factor = 8;
  p.skew = {0.57, 0.19, 0.19, 0.05};
  p.seed = 10;
  auto a = generate_rmat<double>(p);
  auto x = make_dense<double>(a.num_cols, 5, 42);
  for (KernelId id : kAllKernels) {
    CAPTURE(kernel_name(id));
    KernelConfig cfg;
    cfg.worker_count = 2;
    auto first = spmm(id, a, x, cfg);
    auto second = spmm(id, a, x, cfg);
    CHECK(first.data == second.data);
    for (std::size_t wc : {1, 8}) {
      KernelConfig other;
      other.worker_count = wc;
      auto y = spmm(id, a, x, other);
      CHECK(first.data == y.data);
    }
  }
}

TEST_CASE("dimension mismatch is rejected by every kernel") {
  auto a = two_by_two();
  auto x = DenseMatrix<double>::zero(3, 1);
  for (KernelId id : kAllKernels) {
    CHECK_THROWS_AS(spmm(id, a, x), Error);
  }
}

TEST_CASE("invalid configs are rejected") {
  auto a = two_by_two();
  auto x = column({1.0, 1.0});
  CHECK_THROWS_AS(spmm_par_rowsplit(a, x, {.lane_width = 3}), Error);
  CHECK_THROWS_AS(spmm_par_rowsplit(a, x, {.lane_width = 128}), Error);
  CHECK_THROWS_AS(spmm_par_rowsplit(a, x, {.vdl_group = 3}), Error);
  CHECK_THROWS_AS(spmm_seq_balanced(a, x, {.seq_chunk = 0}), Error);
}

TEST_CASE("balanced kernel does no more lane multiplies than row-split on short rows") {
  // Every row shorter than W: row-split wastes idle lanes, the balanced
  // kernel packs chunks tight.
  std::vector<Triple<double>> t;
  SplitMix64 rng(55);
  for (Index i = 0; i < 200; ++i) {
    const Index len = 1 + Index(rng.next() % 7);
    for (Index j = 0; j < len; ++j) t.push_back({i, (i + 13 * j) % 200, 1.0});
  }
  auto a = csr_from_coo(std::move(t), 200, 200);
  auto x = make_dense<double>(200, 1, 77);
  const auto nnz = std::uint64_t(a.nnz());

  KernelStats balanced_stats, rowsplit_stats;
  KernelConfig cfg;
  cfg.worker_count = 1;
  cfg.stats = &balanced_stats;
  (void)spmm_par_balanced(a, x, cfg);
  cfg.stats = &rowsplit_stats;
  (void)spmm_par_rowsplit(a, x, cfg);

  CHECK(balanced_stats.lane_multiplies.load() <= nnz + cfg.lane_width);
  CHECK(balanced_stats.lane_multiplies.load() <=
        rowsplit_stats.lane_multiplies.load());
}
