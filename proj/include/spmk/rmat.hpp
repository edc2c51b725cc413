#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "spmk/csr.hpp"
#include "spmk/error.hpp"

namespace spmk {

/// SplitMix64 (Steele, Lea & Flood): a fixed, platform-independent stream
/// so generated corpora are reproducible everywhere.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

struct RmatSkew {
  double a = 0.57;
  double b = 0.19;
  double c = 0.19;
  double d = 0.05;
};

struct RmatParams {
  std::uint32_t scale = 10;      // dimension 2^scale
  std::uint64_t edge_factor = 8; // target nnz = edge_factor * 2^scale
  RmatSkew skew;
  std::uint64_t seed = 1;
};

inline void validate(const RmatParams& p) {
  if (p.scale < 1 || p.scale > 30) throw Error("rmat scale must be in [1, 30]");
  if (p.edge_factor < 1) throw Error("rmat edge_factor must be >= 1");
  const double probs[4] = {p.skew.a, p.skew.b, p.skew.c, p.skew.d};
  double sum = 0.0;
  for (double q : probs) {
    if (q < 0.0 || q > 1.0) throw Error("rmat quadrant probability outside [0, 1]");
    sum += q;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error("rmat quadrant probabilities must sum to 1");
  }
}

/// Recursive-quadrant edge sampling. Duplicate edges collapse to a single
/// pattern entry of value 1.0. Fully reproducible for a given seed.
template <typename T>
CsrMatrix<T> generate_rmat(const RmatParams& p) {
  validate(p);
  const Index dim = Index(1) << p.scale;
  const std::uint64_t edges = p.edge_factor << p.scale;
  const double t_a = p.skew.a;
  const double t_ab = p.skew.a + p.skew.b;
  const double t_abc = p.skew.a + p.skew.b + p.skew.c;

  SplitMix64 rng(p.seed);
  std::vector<Triple<T>> triples;
  triples.reserve(edges);
  for (std::uint64_t e = 0; e < edges; ++e) {
    Index row = 0, col = 0;
    for (std::uint32_t level = 0; level < p.scale; ++level) {
      const double u = rng.next_unit();
      const int rbit = u >= t_ab;           // quadrants c, d are the lower half
      const int cbit = (u >= t_a && u < t_ab) || u >= t_abc;  // b, d right half
      row = (row << 1) | rbit;
      col = (col << 1) | cbit;
    }
    triples.push_back({row, col, T(1)});
  }
  CsrMatrix<T> a = csr_from_coo(std::move(triples), dim, dim);
  // Duplicates were summed by construction; reset to pattern values.
  std::fill(a.values.begin(), a.values.end(), T(1));
  return a;
}

/// Cartesian product of generator parameters, one matrix per grid cell.
/// Per-cell seeds are drawn in grid order from a SplitMix64 stream seeded
/// by `seed`, so the whole corpus is reproducible.
template <typename T>
std::vector<CsrMatrix<T>> corpus_grid(const std::vector<std::uint32_t>& scales,
                                      const std::vector<std::uint64_t>& edge_factors,
                                      const std::vector<RmatSkew>& skews,
                                      std::uint64_t seed) {
  if (scales.empty() || edge_factors.empty() || skews.empty()) {
    throw Error("corpus_grid: parameter lists must be non-empty");
  }
  SplitMix64 seed_stream(seed);
  std::vector<CsrMatrix<T>> out;
  out.reserve(scales.size() * edge_factors.size() * skews.size());
  for (std::uint32_t s : scales) {
    for (std::uint64_t ef : edge_factors) {
      for (const RmatSkew& sk : skews) {
        RmatParams p;
        p.scale = s;
        p.edge_factor = ef;
        p.skew = sk;
        p.seed = seed_stream.next();
        out.push_back(generate_rmat<T>(p));
      }
    }
  }
  return out;
}

}  // namespace spmk
