#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "spmk/corpus.hpp"
#include "spmk/rmat.hpp"

using namespace spmk;

TEST_CASE("dimension and nnz bounds") {
  RmatParams p;
  p.scale = 4;
  p.edge_factor = 8;
  p.seed = 1;
  auto a = generate_rmat<double>(p);
  CHECK(a.num_rows == 16);
  CHECK(a.num_cols == 16);
  CHECK(a.nnz() >= 1);
  CHECK(a.nnz() <= 128);
  CHECK_NOTHROW(validate(a));
  for (double v : a.values) CHECK(v == 1.0);
}

TEST_CASE("identical params give identical CSR arrays") {
  RmatParams p;
  p.scale = 8;
  p.edge_factor = 8;
  p.seed = 1234;
  auto a = generate_rmat<double>(p);
  auto b = generate_rmat<double>(p);
  CHECK(a == b);
  p.seed = 1235;
  auto c = generate_rmat<double>(p);
  CHECK(a.nnz() != c.nnz());  // different stream, overwhelmingly likely
}

TEST_CASE("uniform recursion yields near-uniform rows") {
  RmatParams p;
  p.scale = 10;
  p.edge_factor = 8;
  p.skew = {0.25, 0.25, 0.25, 0.25};
  p.seed = 7;
  auto f = extract_features(generate_rmat<double>(p));
  CHECK(f.cv < 0.5);
}

TEST_CASE("skewed parameters force imbalanced rows") {
  RmatParams p;
  p.scale = 10;
  p.edge_factor = 16;
  p.skew = {0.57, 0.19, 0.19, 0.05};
  p.seed = 7;
  auto f = extract_features(generate_rmat<double>(p));
  CHECK(f.cv > 1.0);
}

TEST_CASE("skew strictly raises mean cv across seeds") {
  double uniform_total = 0.0;
  double skewed_total = 0.0;
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    RmatParams p;
    p.scale = 9;
    p.edge_factor = 8;
    p.seed = seed;
    p.skew = {0.25, 0.25, 0.25, 0.25};
    uniform_total += extract_features(generate_rmat<double>(p)).cv;
    p.skew = {0.57, 0.19, 0.19, 0.05};
    skewed_total += extract_features(generate_rmat<double>(p)).cv;
  }
  CHECK(skewed_total > uniform_total);
}

TEST_CASE("invalid params are rejected") {
  RmatParams p;
  p.scale = 0;
  CHECK_THROWS_AS(generate_rmat<double>(p), Error);
  p.scale = 4;
  p.skew = {0.5, 0.5, 0.5, 0.5};
  CHECK_THROWS_AS(generate_rmat<double>(p), Error);
  p.skew = {1.2, -0.2, 0.0, 0.0};
  CHECK_THROWS_AS(generate_rmat<double>(p), Error);
  p.skew = {};
  p.edge_factor = 0;
  CHECK_THROWS_AS(generate_rmat<double>(p), Error);
}

TEST_CASE("corpus_grid takes the Cartesian product") {
  auto grid = corpus_grid<double>({4, 5, 6}, {2, 4, 8},
                                  {{0.25, 0.25, 0.25, 0.25},
                                   {0.45, 0.22, 0.22, 0.11},
                                   {0.57, 0.19, 0.19, 0.05}},
                                  11);
  CHECK(grid.size() == 27);

  auto single = corpus_grid<double>({4}, {2}, {{0.25, 0.25, 0.25, 0.25}}, 11);
  CHECK(single.size() == 1);
}

TEST_CASE("corpus_grid is deterministic in the seed") {
  auto g1 = corpus_grid<double>({4, 6}, {2, 4}, {{0.25, 0.25, 0.25, 0.25}}, 5);
  auto g2 = corpus_grid<double>({4, 6}, {2, 4}, {{0.25, 0.25, 0.25, 0.25}}, 5);
  REQUIRE(g1.size() == g2.size());
  for (std::size_t i = 0; i < g1.size(); ++i) CHECK(g1[i] == g2[i]);
}

TEST_CASE("corpus_grid rejects empty parameter lists") {
  CHECK_THROWS_AS(corpus_grid<double>({}, {2}, {{0.25, 0.25, 0.25, 0.25}}, 1),
                  Error);
}

TEST_CASE("the pinned corpus has 27 R-MAT matrices plus 5 edge cases") {
  auto rmats = pinned_rmat_corpus<double>();
  CHECK(rmats.size() == 27);
  auto edges = edge_case_corpus<double>();
  CHECK(edges.size() == 5);
  for (const auto& [name, a] : full_corpus<double>()) {
    CAPTURE(name);
    CHECK_NOTHROW(validate(a));
  }
}
