#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "spmk/error.hpp"

namespace spmk {

using Index = std::int64_t;

template <typename T>
struct Triple {
  Index row = 0;
  Index col = 0;
  T value = T(0);
};

/// Compressed sparse row matrix. Rows are canonical: column indices within
/// each row are strictly increasing (sorted, no duplicates).
template <typename T>
struct CsrMatrix {
  Index num_rows = 0;
  Index num_cols = 0;
  std::vector<Index> row_ptr;  // length num_rows + 1
  std::vector<Index> col_idx;  // length nnz
  std::vector<T> values;       // length nnz

  Index nnz() const { return static_cast<Index>(col_idx.size()); }

  Index row_len(Index i) const { return row_ptr[i + 1] - row_ptr[i]; }

  Index max_row_nnz() const {
    Index m = 0;
    for (Index i = 0; i < num_rows; ++i) m = std::max(m, row_len(i));
    return m;
  }

  std::vector<Triple<T>> to_coo() const {
    std::vector<Triple<T>> out;
    out.reserve(col_idx.size());
    for (Index i = 0; i < num_rows; ++i) {
      for (Index e = row_ptr[i]; e < row_ptr[i + 1]; ++e) {
        out.push_back({i, col_idx[e], values[e]});
      }
    }
    return out;
  }

  bool operator==(const CsrMatrix& o) const {
    return num_rows == o.num_rows && num_cols == o.num_cols &&
           row_ptr == o.row_ptr && col_idx == o.col_idx && values == o.values;
  }
};

/// Row-major dense matrix.
template <typename T>
struct DenseMatrix {
  Index num_rows = 0;
  Index num_cols = 0;
  std::vector<T> data;  // length num_rows * num_cols

  static DenseMatrix zero(Index rows, Index cols) {
    DenseMatrix m;
    m.num_rows = rows;
    m.num_cols = cols;
    m.data.assign(static_cast<std::size_t>(rows) * cols, T(0));
    return m;
  }

  T& operator()(Index i, Index j) { return data[i * num_cols + j]; }
  const T& operator()(Index i, Index j) const { return data[i * num_cols + j]; }

  T* row(Index i) { return data.data() + i * num_cols; }
  const T* row(Index i) const { return data.data() + i * num_cols; }

  bool operator==(const DenseMatrix& o) const {
    return num_rows == o.num_rows && num_cols == o.num_cols && data == o.data;
  }
};

/// Row-length statistics driving kernel selection.
struct MatrixFeatures {
  double avg_row = 0.0;   // mean nonzeros per row
  double stdv_row = 0.0;  // population standard deviation of row lengths
  double cv = 0.0;        // stdv_row / avg_row, 0 when avg_row == 0
  Index num_rows = 0;
  Index nnz = 0;
};

template <typename T>
void validate(const CsrMatrix<T>& a) {
  if (a.num_rows < 0 || a.num_cols < 0) throw Error("negative dimension");
  if (static_cast<Index>(a.row_ptr.size()) != a.num_rows + 1) {
    throw Error("row_ptr length must be num_rows + 1");
  }
  if (a.row_ptr.front() != 0) throw Error("row_ptr[0] must be 0");
  if (a.row_ptr.back() != a.nnz()) throw Error("row_ptr[M] must equal nnz");
  if (a.values.size() != a.col_idx.size()) {
    throw Error("values and col_idx lengths differ");
  }
  for (Index i = 0; i < a.num_rows; ++i) {
    if (a.row_ptr[i] > a.row_ptr[i + 1]) {
      throw Error("row_ptr not non-decreasing at row " + std::to_string(i));
    }
    for (Index e = a.row_ptr[i]; e < a.row_ptr[i + 1]; ++e) {
      if (a.col_idx[e] < 0 || a.col_idx[e] >= a.num_cols) {
        throw Error("column index out of range at row " + std::to_string(i));
      }
      if (e > a.row_ptr[i] && a.col_idx[e] <= a.col_idx[e - 1]) {
        throw Error("columns not strictly increasing in row " +
                    std::to_string(i));
      }
    }
  }
}

/// Builds canonical CSR from coordinate triples. Duplicate (row, col) pairs
/// are summed; entries are sorted within each row.
template <typename T>
CsrMatrix<T> csr_from_coo(std::vector<Triple<T>> triples, Index num_rows,
                          Index num_cols) {
  if (num_rows < 0 || num_cols < 0) throw Error("negative dimension");
  for (const auto& t : triples) {
    if (t.row < 0 || t.row >= num_rows || t.col < 0 || t.col >= num_cols) {
      throw Error("coordinate out of range: (" + std::to_string(t.row) + ", " +
                  std::to_string(t.col) + ", " + std::to_string(double(t.value)) +
                  ") for " + std::to_string(num_rows) + "x" +
                  std::to_string(num_cols));
    }
  }
  std::sort(triples.begin(), triples.end(),
            [](const Triple<T>& a, const Triple<T>& b) {
              return a.row != b.row ? a.row < b.row : a.col < b.col;
            });

  CsrMatrix<T> a;
  a.num_rows = num_rows;
  a.num_cols = num_cols;
  a.row_ptr.assign(num_rows + 1, 0);
  a.col_idx.reserve(triples.size());
  a.values.reserve(triples.size());
  std::size_t i = 0;
  while (i < triples.size()) {
    Index r = triples[i].row;
    Index c = triples[i].col;
    T sum = triples[i].value;
    ++i;
    while (i < triples.size() && triples[i].row == r && triples[i].col == c) {
      sum += triples[i].value;
      ++i;
    }
    a.col_idx.push_back(c);
    a.values.push_back(sum);
    a.row_ptr[r + 1] = static_cast<Index>(a.col_idx.size());
  }
  for (Index r = 0; r < num_rows; ++r) {
    a.row_ptr[r + 1] = std::max(a.row_ptr[r + 1], a.row_ptr[r]);
  }
  return a;
}

template <typename T>
MatrixFeatures extract_features(const CsrMatrix<T>& a) {
  if (a.num_rows < 1) throw Error("extract_features requires num_rows >= 1");
  MatrixFeatures f;
  f.num_rows = a.num_rows;
  f.nnz = a.nnz();
  f.avg_row = static_cast<double>(f.nnz) / static_cast<double>(f.num_rows);
  double ss = 0.0;
  for (Index i = 0; i < a.num_rows; ++i) {
    double d = static_cast<double>(a.row_len(i)) - f.avg_row;
    ss += d * d;
  }
  f.stdv_row = std::sqrt(ss / static_cast<double>(f.num_rows));
  f.cv = f.avg_row == 0.0 ? 0.0 : f.stdv_row / f.avg_row;
  return f;
}

/// Ground-truth SpMM: single-threaded triple loop, 64-bit accumulation
/// regardless of the element width. All kernels are verified against this.
template <typename T>
DenseMatrix<double> oracle_spmm(const CsrMatrix<T>& a,
                                const DenseMatrix<T>& x) {
  if (a.num_cols != x.num_rows) {
    throw Error("dimension mismatch: A is " + std::to_string(a.num_rows) +
                "x" + std::to_string(a.num_cols) + ", X has " +
                std::to_string(x.num_rows) + " rows");
  }
  const Index n = x.num_cols;
  DenseMatrix<double> y = DenseMatrix<double>::zero(a.num_rows, n);
  for (Index i = 0; i < a.num_rows; ++i) {
    for (Index e = a.row_ptr[i]; e < a.row_ptr[i + 1]; ++e) {
      const double v = static_cast<double>(a.values[e]);
      const Index k = a.col_idx[e];
      for (Index j = 0; j < n; ++j) {
        y(i, j) += v * static_cast<double>(x(k, j));
      }
    }
  }
  return y;
}

}  // namespace spmk
