#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace umbilic {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator-() const { return {-x, -y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }

  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm2() const { return x * x + y * y; }
  double norm() const { return std::hypot(x, y); }
  Vec2 unit() const { double n = norm(); return {x / n, y / n}; }
  Vec2 perp() const { return {-y, x}; }
  double angle() const { return std::atan2(y, x); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

// Base-plane and fibre-plane points are both planar; the aliases keep
// signatures readable.
using BasePoint = Vec2;
using FiberPoint = Vec2;

// Row-major 2x2 matrix.
struct Mat2 {
  double a11 = 0, a12 = 0, a21 = 0, a22 = 0;

  static Mat2 identity() { return {1, 0, 0, 1}; }

  Vec2 operator*(Vec2 v) const { return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y}; }
  Mat2 operator*(const Mat2& o) const {
    return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
            a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
  }
  double det() const { return a11 * a22 - a12 * a21; }
  double trace() const { return a11 + a22; }
  Mat2 inverse() const {
    double d = det();
    return {a22 / d, -a12 / d, -a21 / d, a11 / d};
  }

  // Eigenvalues of a symmetric matrix (a12 == a21), ascending.
  std::array<double, 2> sym_eigenvalues() const {
    double m = 0.5 * (a11 + a22);
    double d = std::hypot(0.5 * (a11 - a22), a12);
    return {m - d, m + d};
  }

  // Unit eigenvector of a symmetric matrix for eigenvalue lam.
  Vec2 sym_eigenvector(double lam) const {
    Vec2 r1{a11 - lam, a12};
    Vec2 r2{a12, a22 - lam};
    // eigenvector is orthogonal to the larger residual row
    Vec2 r = (r1.norm2() >= r2.norm2()) ? r1 : r2;
    if (r.norm2() == 0.0) return {1.0, 0.0};
    return r.perp().unit();
  }
};

using Polyline = std::vector<Vec2>;

struct Window {
  Vec2 lo{-1.0, -1.0};
  Vec2 hi{1.0, 1.0};

  bool contains(Vec2 p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
  }
  Vec2 center() const { return (lo + hi) * 0.5; }
  double width() const { return hi.x - lo.x; }
  double height() const { return hi.y - lo.y; }
};

// Proper or touching intersection of closed segments [a,b] and [c,d].
bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

// True if segment [a,b] crosses any segment of the polyline.
bool segment_hits_polyline(Vec2 a, Vec2 b, const Polyline& poly);

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);
double point_polyline_distance(Vec2 p, const Polyline& poly);
double polyline_length(const Polyline& poly);

// Index of the polyline vertex nearest to p.
std::size_t nearest_vertex(Vec2 p, const Polyline& poly);

// Wrap an angle into (-pi, pi].
double wrap_angle(double a);

}  // namespace umbilic
