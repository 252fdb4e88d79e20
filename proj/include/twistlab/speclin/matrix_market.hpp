#pragma once

#include <charconv>
#include <fstream>
#include <limits>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "twistlab/errors.hpp"
#include "twistlab/speclin/sparse.hpp"

namespace twistlab::speclin {

// Matrix Market coordinate I/O for symmetric matrices. Only the lower
// triangle is written (the format's symmetric convention); values use the
// shortest decimal representation that round-trips exactly, so dump followed
// by load reproduces the matrix bit for bit.

namespace detail {

inline void put_double(std::ostream& os, double v) {
  char buf[40];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  os.write(buf, r.ptr - buf);
}

}  // namespace detail

inline void write_matrix_market(const SparseSymMatrix& a, std::ostream& os) {
  std::size_t lower = 0;
  a.for_each([&](std::size_t i, std::size_t j, double) {
    if (i >= j) ++lower;
  });
  os << "%%MatrixMarket matrix coordinate real symmetric\n";
  os << a.rows() << ' ' << a.rows() << ' ' << lower << '\n';
  a.for_each([&](std::size_t i, std::size_t j, double v) {
    if (i < j) return;
    os << (i + 1) << ' ' << (j + 1) << ' ';
    detail::put_double(os, v);
    os << '\n';
  });
  if (!os) throw IoError("matrix market write failed");
}

inline SparseSymMatrix read_matrix_market(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) ||
      line.rfind("%%MatrixMarket", 0) != 0 ||
      line.find("coordinate") == std::string::npos ||
      line.find("symmetric") == std::string::npos)
    throw IoError("matrix market: expected a coordinate symmetric header");
  do {
    if (!std::getline(is, line)) throw IoError("matrix market: missing size line");
  } while (!line.empty() && line[0] == '%');

  std::size_t rows = 0, cols = 0, nnz = 0;
  {
    std::istringstream ls(line);
    if (!(ls >> rows >> cols >> nnz) || rows != cols)
      throw IoError("matrix market: bad size line");
    if (rows > static_cast<std::size_t>(std::numeric_limits<int>::max()))
      throw IoError("matrix market: dimension exceeds index range");
  }
  TripletBuffer buf;
  for (std::size_t e = 0; e < nnz; ++e) {
    if (!std::getline(is, line)) throw IoError("matrix market: truncated entries");
    const char* p = line.c_str();
    const char* end = p + line.size();
    auto skip_ws = [&] {
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
    };
    std::size_t i = 0, j = 0;
    double v = 0.0;
    skip_ws();
    auto r1 = std::from_chars(p, end, i);
    if (r1.ec != std::errc{}) throw IoError("matrix market: bad row index");
    p = r1.ptr;
    skip_ws();
    auto r2 = std::from_chars(p, end, j);
    if (r2.ec != std::errc{}) throw IoError("matrix market: bad column index");
    p = r2.ptr;
    skip_ws();
    auto r3 = std::from_chars(p, end, v);
    if (r3.ec != std::errc{}) throw IoError("matrix market: bad value");
    if (i < 1 || j < 1 || i > rows || j > rows)
      throw IoError("matrix market: index out of range");
    if (j > i) throw IoError("matrix market: upper-triangle entry in symmetric file");
    buf.add(static_cast<int>(i) - 1, static_cast<int>(j) - 1, v);
  }
  return buf.build(static_cast<int>(rows));
}

inline void save_matrix_market(const SparseSymMatrix& a, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path);
  write_matrix_market(a, f);
}

inline SparseSymMatrix load_matrix_market(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open for reading: " + path);
  return read_matrix_market(f);
}

}  // namespace twistlab::speclin
