#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "spmk/csr.hpp"
#include "spmk/error.hpp"

namespace spmk {

enum class MmField { real, integer, pattern };
enum class MmSymmetry { general, symmetric };

struct MatrixMarketHeader {
  MmField field = MmField::real;
  MmSymmetry symmetry = MmSymmetry::general;
};

namespace detail {

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

inline std::vector<std::string> tokens(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string t;
  while (ss >> t) out.push_back(t);
  return out;
}

[[noreturn]] inline void io_fail(std::size_t line_no, const std::string& msg) {
  throw Error("matrix market, line " + std::to_string(line_no) + ": " + msg);
}

inline MatrixMarketHeader parse_header(const std::string& line,
                                       std::size_t line_no) {
  auto t = tokens(line);
  if (t.size() != 5 || lower(t[0]) != "%%matrixmarket") {
    io_fail(line_no, "malformed banner, expected "
                     "'%%MatrixMarket matrix coordinate <field> <symmetry>'");
  }
  if (lower(t[1]) != "matrix") io_fail(line_no, "unsupported object '" + t[1] + "'");
  if (lower(t[2]) != "coordinate") {
    io_fail(line_no, "unsupported format '" + t[2] + "' (only coordinate)");
  }
  MatrixMarketHeader h;
  const std::string field = lower(t[3]);
  if (field == "real") h.field = MmField::real;
  else if (field == "integer") h.field = MmField::integer;
  else if (field == "pattern") h.field = MmField::pattern;
  else io_fail(line_no, "unsupported field '" + t[3] + "'");
  const std::string sym = lower(t[4]);
  if (sym == "general") h.symmetry = MmSymmetry::general;
  else if (sym == "symmetric") h.symmetry = MmSymmetry::symmetric;
  else io_fail(line_no, "unsupported symmetry '" + t[4] + "'");
  return h;
}

}  // namespace detail

/// Reads a Matrix Market coordinate file into canonical CSR. Pattern
/// entries get value 1.0, symmetric matrices are expanded (off-diagonal
/// entries mirrored), duplicates are summed.
template <typename T>
CsrMatrix<T> read_matrix_market(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) detail::io_fail(1, "empty input");
  ++line_no;
  const MatrixMarketHeader header = detail::parse_header(line, line_no);

  // Size line, after any comments / blank lines.
  Index rows = 0, cols = 0;
  long long declared_nnz = 0;
  for (;;) {
    if (!std::getline(in, line)) detail::io_fail(line_no + 1, "missing size line");
    ++line_no;
    auto t = detail::tokens(line);
    if (t.empty() || t[0][0] == '%') continue;
    if (t.size() != 3) detail::io_fail(line_no, "size line must be 'rows cols nnz'");
    try {
      rows = std::stoll(t[0]);
      cols = std::stoll(t[1]);
      declared_nnz = std::stoll(t[2]);
    } catch (const std::exception&) {
      detail::io_fail(line_no, "size line must be 'rows cols nnz'");
    }
    if (rows < 0 || cols < 0 || declared_nnz < 0) {
      detail::io_fail(line_no, "negative size field");
    }
    break;
  }

  const std::size_t values_per_entry = header.field == MmField::pattern ? 2 : 3;
  std::vector<Triple<T>> triples;
  triples.reserve(static_cast<std::size_t>(declared_nnz));
  long long seen = 0;
  while (seen < declared_nnz) {
    if (!std::getline(in, line)) {
      detail::io_fail(line_no + 1, "truncated entry list: got " +
                                       std::to_string(seen) + " of " +
                                       std::to_string(declared_nnz));
    }
    ++line_no;
    auto t = detail::tokens(line);
    if (t.empty()) continue;
    if (t.size() != values_per_entry) {
      detail::io_fail(line_no, "entry must have " +
                                   std::to_string(values_per_entry) + " fields");
    }
    Index r = 0, c = 0;
    T v = T(1);
    try {
      r = std::stoll(t[0]);
      c = std::stoll(t[1]);
      if (header.field != MmField::pattern) v = static_cast<T>(std::stod(t[2]));
    } catch (const std::exception&) {
      detail::io_fail(line_no, "malformed entry '" + line + "'");
    }
    if (r < 1 || r > rows || c < 1 || c > cols) {
      detail::io_fail(line_no, "index (" + std::to_string(r) + ", " +
                                   std::to_string(c) +
                                   ") outside declared bounds");
    }
    triples.push_back({r - 1, c - 1, v});
    if (header.symmetry == MmSymmetry::symmetric && r != c) {
      triples.push_back({c - 1, r - 1, v});
    }
    ++seen;
  }
  return csr_from_coo(std::move(triples), rows, cols);
}

template <typename T>
CsrMatrix<T> read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return read_matrix_market<T>(in);
}

/// Emits "general real coordinate" form, 1-based, entries in row-major
/// order. read(write(a)) is identity on canonical CSR.
template <typename T>
void write_matrix_market(const CsrMatrix<T>& a, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.num_rows << " " << a.num_cols << " " << a.nnz() << "\n";
  out.precision(std::numeric_limits<T>::max_digits10);
  for (Index i = 0; i < a.num_rows; ++i) {
    for (Index e = a.row_ptr[i]; e < a.row_ptr[i + 1]; ++e) {
      out << (i + 1) << " " << (a.col_idx[e] + 1) << " " << a.values[e] << "\n";
    }
  }
  if (!out) throw Error("write failure on matrix market sink");
}

template <typename T>
void write_matrix_market(const CsrMatrix<T>& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  write_matrix_market(a, out);
}

}  // namespace spmk
