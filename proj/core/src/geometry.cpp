#include "umbilic/geometry.hpp"

#include <algorithm>
#include <limits>

namespace umbilic {

namespace {

int orient(Vec2 a, Vec2 b, Vec2 c) {
  double v = (b - a).cross(c - a);
  if (v > 0) return 1;
  if (v < 0) return -1;
  return 0;
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

}  // namespace

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  int o1 = orient(a, b, c), o2 = orient(a, b, d);
  int o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

bool segment_hits_polyline(Vec2 a, Vec2 b, const Polyline& poly) {
  for (std::size_t k = 0; k + 1 < poly.size(); ++k) {
    if (segments_intersect(a, b, poly[k], poly[k + 1])) return true;
  }
  return false;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 ab = b - a;
  double len2 = ab.norm2();
  if (len2 == 0.0) return (p - a).norm();
  double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + ab * t)).norm();
}

double point_polyline_distance(Vec2 p, const Polyline& poly) {
  if (poly.empty()) return std::numeric_limits<double>::infinity();
  if (poly.size() == 1) return (p - poly[0]).norm();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < poly.size(); ++k) {
    best = std::min(best, point_segment_distance(p, poly[k], poly[k + 1]));
  }
  return best;
}

double polyline_length(const Polyline& poly) {
  double len = 0.0;
  for (std::size_t k = 0; k + 1 < poly.size(); ++k) len += (poly[k + 1] - poly[k]).norm();
  return len;
}

std::size_t nearest_vertex(Vec2 p, const Polyline& poly) {
  std::size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < poly.size(); ++k) {
    double d = (p - poly[k]).norm2();
    if (d < bd) { bd = d; best = k; }
  }
  return best;
}

double wrap_angle(double a) {
  while (a <= -3.14159265358979323846) a += 2.0 * 3.14159265358979323846;
  while (a > 3.14159265358979323846) a -= 2.0 * 3.14159265358979323846;
  return a;
}

}  // namespace umbilic
