#pragma once

#include <string>
#include <utility>
#include <vector>

#include "spmk/csr.hpp"
#include "spmk/rmat.hpp"

namespace spmk {

template <typename T>
using NamedMatrix = std::pair<std::string, CsrMatrix<T>>;

inline const std::vector<std::uint32_t>& corpus_scales() {
  static const std::vector<std::uint32_t> v{8, 10, 12};
  return v;
}

inline const std::vector<std::uint64_t>& corpus_edge_factors() {
  static const std::vector<std::uint64_t> v{4, 8, 16};
  return v;
}

inline const std::vector<std::pair<std::string, RmatSkew>>& corpus_skews() {
  static const std::vector<std::pair<std::string, RmatSkew>> v{
      {"uniform", {0.25, 0.25, 0.25, 0.25}},
      {"mild", {0.45, 0.22, 0.22, 0.11}},
      {"heavy", {0.57, 0.19, 0.19, 0.05}},
  };
  return v;
}

/// The pinned 27-matrix R-MAT corpus: 3 scales x 3 edge factors x 3 skews.
template <typename T>
std::vector<NamedMatrix<T>> pinned_rmat_corpus(std::uint64_t seed = 42) {
  std::vector<RmatSkew> skews;
  for (const auto& [name, sk] : corpus_skews()) skews.push_back(sk);
  auto mats = corpus_grid<T>(corpus_scales(), corpus_edge_factors(), skews, seed);

  std::vector<NamedMatrix<T>> out;
  out.reserve(mats.size());
  std::size_t idx = 0;
  for (std::uint32_t s : corpus_scales()) {
    for (std::uint64_t ef : corpus_edge_factors()) {
      for (const auto& [skew_name, sk] : corpus_skews()) {
        out.emplace_back("rmat_s" + std::to_string(s) + "_e" +
                             std::to_string(ef) + "_" + skew_name,
                         std::move(mats[idx++]));
      }
    }
  }
  return out;
}

/// Hand-built edge-case matrices: empty, single long row, all-singleton
/// rows, empty-row-riddled, dense block.
template <typename T>
std::vector<NamedMatrix<T>> edge_case_corpus() {
  std::vector<NamedMatrix<T>> out;
  SplitMix64 rng(0xEDCE);

  {
    CsrMatrix<T> a;
    a.num_rows = 64;
    a.num_cols = 64;
    a.row_ptr.assign(65, 0);
    out.emplace_back("empty", std::move(a));
  }
  {
    std::vector<Triple<T>> t;
    for (Index j = 0; j < 1000; ++j) {
      t.push_back({0, 2 * j, static_cast<T>(2.0 * rng.next_unit() - 1.0)});
    }
    out.emplace_back("single_long_row", csr_from_coo(std::move(t), 1, 2048));
  }
  {
    std::vector<Triple<T>> t;
    for (Index i = 0; i < 1024; ++i) {
      t.push_back({i, (i * 7 + 3) % 1024,
                   static_cast<T>(2.0 * rng.next_unit() - 1.0)});
    }
    out.emplace_back("singleton_rows", csr_from_coo(std::move(t), 1024, 1024));
  }
  {
    std::vector<Triple<T>> t;
    for (Index i = 0; i < 512; i += 3) {
      for (Index j = 0; j < 5; ++j) {
        t.push_back({i, (i + 31 * j) % 512,
                     static_cast<T>(2.0 * rng.next_unit() - 1.0)});
      }
    }
    out.emplace_back("empty_row_riddled", csr_from_coo(std::move(t), 512, 512));
  }
  {
    std::vector<Triple<T>> t;
    for (Index i = 0; i < 48; ++i) {
      for (Index j = 0; j < 48; ++j) {
        t.push_back({i, j, static_cast<T>(2.0 * rng.next_unit() - 1.0)});
      }
    }
    out.emplace_back("dense_block", csr_from_coo(std::move(t), 48, 48));
  }
  return out;
}

/// R-MAT corpus plus the edge cases — the full acceptance corpus.
template <typename T>
std::vector<NamedMatrix<T>> full_corpus(std::uint64_t seed = 42) {
  auto out = pinned_rmat_corpus<T>(seed);
  for (auto& nm : edge_case_corpus<T>()) out.push_back(std::move(nm));
  return out;
}

/// Deterministic dense operand with values in [-1, 1].
template <typename T>
DenseMatrix<T> make_dense(Index rows, Index cols, std::uint64_t seed) {
  DenseMatrix<T> x = DenseMatrix<T>::zero(rows, cols);
  SplitMix64 rng(seed);
  for (auto& v : x.data) v = static_cast<T>(2.0 * rng.next_unit() - 1.0);
  return x;
}

}  // namespace spmk
