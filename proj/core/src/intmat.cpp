#include "umbilic/intmat.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>

namespace umbilic {

IntMat::IntMat(int r, int c, std::initializer_list<std::int64_t> vals) : rows(r), cols(c) {
  if (static_cast<int>(vals.size()) != r * c) throw Error("IntMat: initializer size mismatch");
  std::copy(vals.begin(), vals.end(), a.begin());
}

IntMat IntMat::identity(int n) {
  IntMat m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

IntMat IntMat::elementary(int n, int i, int j, std::int64_t tau) {
  if (i < 1 || i > n || j < 1 || j > n || i == j) throw Error("elementary: bad (i, j)");
  IntMat m = identity(n);
  m.at(i - 1, j - 1) = tau;
  return m;
}

IntMat IntMat::operator*(const IntMat& o) const {
  if (cols != o.rows) throw Error("IntMat: dimension mismatch in product");
  IntMat r(rows, o.cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < o.cols; ++j) {
      std::int64_t s = 0;
      for (int k = 0; k < cols; ++k) s += at(i, k) * o.at(k, j);
      r.at(i, j) = s;
    }
  return r;
}

std::array<std::int64_t, 3> IntMat::operator*(const std::array<std::int64_t, 3>& v) const {
  if (cols > 3) throw Error("IntMat: vector apply needs cols <= 3");
  std::array<std::int64_t, 3> r{0, 0, 0};
  for (int i = 0; i < rows; ++i) {
    std::int64_t s = 0;
    for (int k = 0; k < cols; ++k) s += at(i, k) * v[static_cast<std::size_t>(k)];
    r[static_cast<std::size_t>(i)] = s;
  }
  return r;
}

bool IntMat::operator==(const IntMat& o) const {
  if (rows != o.rows || cols != o.cols) return false;
  for (int i = 0; i < rows * cols; ++i)
    if (a[static_cast<std::size_t>(i)] != o.a[static_cast<std::size_t>(i)]) return false;
  return true;
}

bool IntMat::is_identity() const {
  if (!is_square()) return false;
  return *this == identity(rows);
}

std::int64_t IntMat::det() const {
  if (!is_square()) throw Error("det: non-square");
  switch (rows) {
    case 1: return at(0, 0);
    case 2: return at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0);
    case 3:
      return at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) -
             at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0)) +
             at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
    default: throw Error("det: size > 3");
  }
}

std::int64_t IntMat::trace() const {
  if (!is_square()) throw Error("trace: non-square");
  std::int64_t t = 0;
  for (int i = 0; i < rows; ++i) t += at(i, i);
  return t;
}

IntMat IntMat::unimodular_inverse() const {
  std::int64_t d = det();
  if (d != 1 && d != -1) throw Error("unimodular_inverse: determinant is not +-1");
  IntMat inv(rows, cols);
  if (rows == 1) {
    inv.at(0, 0) = d;  // 1/d == d for d = +-1
    return inv;
  }
  if (rows == 2) {
    inv.at(0, 0) = d * at(1, 1);
    inv.at(0, 1) = -d * at(0, 1);
    inv.at(1, 0) = -d * at(1, 0);
    inv.at(1, 1) = d * at(0, 0);
    return inv;
  }
  // adjugate for 3x3
  auto cof = [&](int i, int j) {
    int r0 = (i + 1) % 3, r1 = (i + 2) % 3, c0 = (j + 1) % 3, c1 = (j + 2) % 3;
    return at(r0, c0) * at(r1, c1) - at(r0, c1) * at(r1, c0);
  };
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) inv.at(j, i) = d * cof(i, j);
  return inv;
}

IntMat IntMat::delete_row_col(int k) const {
  if (!is_square() || k < 0 || k >= rows) throw Error("delete_row_col: bad index");
  IntMat r(rows - 1, cols - 1);
  for (int i = 0, ri = 0; i < rows; ++i) {
    if (i == k) continue;
    for (int j = 0, rj = 0; j < cols; ++j) {
      if (j == k) continue;
      r.at(ri, rj) = at(i, j);
      ++rj;
    }
    ++ri;
  }
  return r;
}

std::string IntMat::to_string() const {
  // column-aligned entries with a space reserved for the sign
  int width = 1;
  for (int i = 0; i < rows * cols; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(a[static_cast<std::size_t>(i)]));
    width = std::max(width, static_cast<int>(std::string(buf).size()));
  }
  std::string out;
  for (int i = 0; i < rows; ++i) {
    out += "[";
    for (int j = 0; j < cols; ++j) {
      char buf[48];
      std::snprintf(buf, sizeof(buf), " %*lld", width, static_cast<long long>(at(i, j)));
      out += buf;
    }
    out += " ]";
    if (i + 1 < rows) out += "\n";
  }
  return out;
}

}  // namespace umbilic
