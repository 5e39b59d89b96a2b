#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "umbilic/errors.hpp"

namespace umbilic {

// Small dense integer matrix, at most 3x3.  All homological bookkeeping is
// exact: no floating point ever enters these entries.
struct IntMat {
  int rows = 0;
  int cols = 0;
  std::array<std::int64_t, 9> a{};

  IntMat() = default;
  IntMat(int r, int c) : rows(r), cols(c) {}
  IntMat(int r, int c, std::initializer_list<std::int64_t> vals);

  static IntMat identity(int n);
  // Elementary n x n matrix: identity plus tau at entry (i, j), 1-based.
  static IntMat elementary(int n, int i, int j, std::int64_t tau);

  std::int64_t& at(int i, int j) { return a[static_cast<std::size_t>(i * cols + j)]; }
  std::int64_t at(int i, int j) const { return a[static_cast<std::size_t>(i * cols + j)]; }

  IntMat operator*(const IntMat& o) const;
  std::array<std::int64_t, 3> operator*(const std::array<std::int64_t, 3>& v) const;
  bool operator==(const IntMat& o) const;
  bool operator!=(const IntMat& o) const { return !(*this == o); }

  bool is_identity() const;
  bool is_square() const { return rows == cols; }
  std::int64_t det() const;                  // square only, n <= 3
  std::int64_t trace() const;
  IntMat unimodular_inverse() const;         // requires |det| == 1
  IntMat delete_row_col(int k) const;        // 0-based row/col removal

  // Rows printed with sign-aligned entries, one row per line.
  std::string to_string() const;
};

}  // namespace umbilic
