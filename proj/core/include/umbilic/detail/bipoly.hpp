#pragma once

#include <array>

#include "umbilic/family.hpp"
#include "umbilic/polyroots.hpp"

namespace umbilic::detail {

// Dense bivariate polynomial up to total degree 4; c[i][j] multiplies
// y1^i y2^j.  Internal building block of the solvers and integrators.
struct BiPoly {
  std::array<std::array<double, 5>, 5> c{};

  double eval(Vec2 y) const {
    // Horner in y2 inside Horner in y1
    double v = 0.0;
    for (int i = 4; i >= 0; --i) {
      double row = 0.0;
      for (int j = 4; j >= 0; --j) row = row * y.y + c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      v = v * y.x + row;
    }
    return v;
  }

  int deg_y2() const {
    for (int j = 4; j >= 0; --j)
      for (int i = 0; i <= 4; ++i)
        if (c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] != 0.0) return j;
    return -1;
  }

  Poly coeff_poly(int j) const {
    Poly p;
    for (int i = 0; i <= 4; ++i) p.push_back(c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    return poly_trim(p);
  }

  Poly at_y1(double t) const {
    Poly p(5, 0.0);
    double p1 = 1.0;
    for (int i = 0; i <= 4; ++i) {
      for (int j = 0; j <= 4; ++j) p[static_cast<std::size_t>(j)] += c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * p1;
      p1 *= t;
    }
    return poly_trim(p, 0.0);
  }
};

inline BiPoly partial1(const GeneratingFunction& f, double x1) {
  BiPoly p;
  for (int i = 1; i <= 4; ++i)
    for (int j = 0; i + j <= 4; ++j) p.c[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)] += f.coeff(i, j) * i;
  p.c[0][0] -= x1;
  return p;
}

inline BiPoly partial2(const GeneratingFunction& f, double x2) {
  BiPoly p;
  for (int i = 0; i <= 4; ++i)
    for (int j = 1; i + j <= 4; ++j) p.c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j - 1)] += f.coeff(i, j) * j;
  p.c[0][0] -= x2;
  return p;
}

// Gradient field of f_x with a direction sign: sign = -1 is the descending
// flow, +1 the ascending (time-reversed) flow.
struct GradField {
  BiPoly g1, g2;
  double sign = -1.0;

  GradField(const GeneratingFunction& f, BasePoint x, double s)
      : g1(partial1(f, x.x)), g2(partial2(f, x.y)), sign(s) {}

  Vec2 operator()(Vec2 y) const { return {sign * g1.eval(y), sign * g2.eval(y)}; }
};

}  // namespace umbilic::detail
