#include "umbilic/family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "umbilic/detail/bipoly.hpp"
#include "umbilic/polyroots.hpp"

namespace umbilic {

std::size_t GeneratingFunction::check(int i, int j) {
  if (i < 0 || j < 0 || i + j > kMaxDegree) throw Error("GeneratingFunction: exponent out of range");
  return static_cast<std::size_t>(i * 5 + j);
}

double GeneratingFunction::value(FiberPoint y) const {
  double p1[5] = {1, y.x, y.x * y.x, y.x * y.x * y.x, y.x * y.x * y.x * y.x};
  double p2[5] = {1, y.y, y.y * y.y, y.y * y.y * y.y, y.y * y.y * y.y * y.y};
  double v = 0.0;
  for (int i = 0; i <= 4; ++i)
    for (int j = 0; i + j <= 4; ++j) {
      double c = c_[static_cast<std::size_t>(i * 5 + j)];
      if (c != 0.0) v += c * p1[i] * p2[j];
    }
  return v;
}

Vec2 GeneratingFunction::gradient(FiberPoint y) const {
  double p1[5] = {1, y.x, y.x * y.x, y.x * y.x * y.x, y.x * y.x * y.x * y.x};
  double p2[5] = {1, y.y, y.y * y.y, y.y * y.y * y.y, y.y * y.y * y.y * y.y};
  double g1 = 0.0, g2 = 0.0;
  for (int i = 0; i <= 4; ++i)
    for (int j = 0; i + j <= 4; ++j) {
      double c = c_[static_cast<std::size_t>(i * 5 + j)];
      if (c == 0.0) continue;
      if (i > 0) g1 += c * i * p1[i - 1] * p2[j];
      if (j > 0) g2 += c * j * p1[i] * p2[j - 1];
    }
  return {g1, g2};
}

Mat2 GeneratingFunction::hessian(FiberPoint y) const {
  double p1[5] = {1, y.x, y.x * y.x, y.x * y.x * y.x, y.x * y.x * y.x * y.x};
  double p2[5] = {1, y.y, y.y * y.y, y.y * y.y * y.y, y.y * y.y * y.y * y.y};
  double h11 = 0.0, h12 = 0.0, h22 = 0.0;
  for (int i = 0; i <= 4; ++i)
    for (int j = 0; i + j <= 4; ++j) {
      double c = c_[static_cast<std::size_t>(i * 5 + j)];
      if (c == 0.0) continue;
      if (i > 1) h11 += c * i * (i - 1) * p1[i - 2] * p2[j];
      if (i > 0 && j > 0) h12 += c * i * j * p1[i - 1] * p2[j - 1];
      if (j > 1) h22 += c * j * (j - 1) * p1[i] * p2[j - 2];
    }
  return {h11, h12, h12, h22};
}

int GeneratingFunction::degree(double tol) const {
  int d = 0;
  for (int i = 0; i <= 4; ++i)
    for (int j = 0; i + j <= 4; ++j)
      if (std::abs(c_[static_cast<std::size_t>(i * 5 + j)]) > tol) d = std::max(d, i + j);
  return d;
}

std::vector<std::array<double, 3>> GeneratingFunction::monomials() const {
  std::vector<std::array<double, 3>> out;
  for (int i = 0; i <= 4; ++i)
    for (int j = 0; i + j <= 4; ++j) {
      double c = c_[static_cast<std::size_t>(i * 5 + j)];
      if (c != 0.0) out.push_back({static_cast<double>(i), static_cast<double>(j), c});
    }
  return out;
}

GeneratingFunction elliptic_umbilic() {
  GeneratingFunction f;
  f.set_coeff(3, 0, 1.0 / 3.0);
  f.set_coeff(1, 2, -2.0);
  return f;
}

double Perturbation::norm() const {
  double n = 0.0;
  for (const auto& [ij, c] : terms) n += c * c;
  return std::sqrt(n);
}

Perturbation Perturbation::radial(double eps) {
  Perturbation p;
  if (eps != 0.0) {
    p.terms[{2, 0}] = -eps;
    p.terms[{0, 2}] = -eps;
  }
  return p;
}

GeneratingFunction perturb(const GeneratingFunction& f, const Perturbation& p) {
  GeneratingFunction g = f;
  for (const auto& [ij, c] : p.terms) {
    auto [i, j] = ij;
    if (i < 0 || j < 0 || i + j > GeneratingFunction::kMaxDegree)
      throw Error("perturb: term raises degree above 4");
    g.set_coeff(i, j, g.coeff(i, j) + c);
  }
  return g;
}

BasePoint lagrangian_map(const GeneratingFunction& f, FiberPoint y) { return f.gradient(y); }

const char* to_string(PointLabel l) {
  switch (l) {
    case PointLabel::kS1: return "s1";
    case PointLabel::kS2: return "s2";
    case PointLabel::kS3: return "s3";
    case PointLabel::kNode: return "n";
    default: return "unlabeled";
  }
}

bool is_saddle_label(PointLabel l) {
  return l == PointLabel::kS1 || l == PointLabel::kS2 || l == PointLabel::kS3;
}

int saddle_slot(PointLabel l) {
  if (!is_saddle_label(l)) throw LabelMismatch("saddle_slot: not a saddle label");
  return static_cast<int>(l);
}

PointLabel saddle_label(int slot) {
  if (slot < 0 || slot > 2) throw LabelMismatch("saddle_label: slot out of range");
  return static_cast<PointLabel>(slot);
}

const CriticalPoint* FiberData::find(PointLabel l) const {
  for (const auto& p : points)
    if (p.label == l) return &p;
  return nullptr;
}

const CriticalPoint* FiberData::node() const {
  for (const auto& p : points)
    if (p.is_node()) return &p;
  return nullptr;
}

std::vector<const CriticalPoint*> FiberData::saddles() const {
  std::vector<const CriticalPoint*> out;
  for (const auto& p : points)
    if (p.is_saddle()) out.push_back(&p);
  return out;
}

// --- gradient system solving -------------------------------------------------

namespace {

using detail::BiPoly;
using detail::partial1;
using detail::partial2;

// Determinant of a small matrix of polynomials by cofactor expansion.
Poly poly_det(std::vector<std::vector<Poly>>& m) {
  std::size_t n = m.size();
  if (n == 1) return m[0][0];
  Poly det;
  for (std::size_t k = 0; k < n; ++k) {
    if (poly_degree(m[0][k]) < 0) continue;
    std::vector<std::vector<Poly>> minor(n - 1);
    for (std::size_t i = 1; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (j != k) minor[i - 1].push_back(m[i][j]);
    Poly term = poly_mul(m[0][k], poly_det(minor));
    det = (k % 2 == 0) ? poly_add(det, term) : poly_sub(det, term);
  }
  return det;
}

// Sylvester resultant of p and q with respect to y2, as a polynomial in y1.
Poly resultant_y2(const BiPoly& p, const BiPoly& q) {
  int m = p.deg_y2(), n = q.deg_y2();
  if (m < 0 || n < 0) return {};
  std::size_t size = static_cast<std::size_t>(m + n);
  if (size == 0) return {};
  std::vector<std::vector<Poly>> s(size, std::vector<Poly>(size, Poly{}));
  for (int r = 0; r < n; ++r)
    for (int k = 0; k <= m; ++k) s[static_cast<std::size_t>(r)][static_cast<std::size_t>(r + k)] = p.coeff_poly(m - k);
  for (int r = 0; r < m; ++r)
    for (int k = 0; k <= n; ++k) s[static_cast<std::size_t>(n + r)][static_cast<std::size_t>(r + k)] = q.coeff_poly(n - k);
  return poly_det(s);
}

bool newton2d(const GeneratingFunction& f, BasePoint x, Vec2& y, double tol, int max_iter = 60) {
  for (int it = 0; it < max_iter; ++it) {
    Vec2 g = f.gradient_at(x, y);
    double scale = 1.0 + y.norm2();
    if (g.norm() <= tol * scale) return true;
    Mat2 h = f.hessian(y);
    double d = h.det();
    if (std::abs(d) < 1e-300) return false;
    Vec2 step = h.inverse() * g;
    y -= step;
    if (!y.finite()) return false;
  }
  Vec2 g = f.gradient_at(x, y);
  return g.norm() <= tol * (1.0 + y.norm2());
}

void add_root(std::vector<Vec2>& roots, Vec2 y, double merge_tol) {
  for (Vec2 r : roots)
    if ((r - y).norm() <= merge_tol * (1.0 + y.norm())) return;
  roots.push_back(y);
}

std::vector<Vec2> roots_by_resultant(const GeneratingFunction& f, BasePoint x,
                                     const SolverConfig& cfg) {
  BiPoly p = partial1(f, x.x);
  BiPoly q = partial2(f, x.y);
  std::vector<Vec2> roots;
  int mp = p.deg_y2(), mq = q.deg_y2();

  auto candidates_at = [&](double y1) {
    std::vector<double> ys;
    if (mp >= 1)
      for (double r : real_roots(p.at_y1(y1))) ys.push_back(r);
    if (mq >= 1)
      for (double r : real_roots(q.at_y1(y1))) ys.push_back(r);
    for (double y2 : ys) {
      Vec2 y{y1, y2};
      if (!newton2d(f, x, y, cfg.newton_tol)) continue;
      add_root(roots, y, cfg.merge_tol);
    }
  };

  if (mp <= 0 && mq <= 0) throw SolverDivergence("gradient system does not involve y2");
  if (mp == 0) {
    // first equation is univariate in y1
    for (double y1 : real_roots(p.coeff_poly(0))) candidates_at(y1);
    return roots;
  }
  if (mq == 0) {
    for (double y1 : real_roots(q.coeff_poly(0))) candidates_at(y1);
    return roots;
  }
  Poly res = resultant_y2(p, q);
  if (poly_degree(res) < 0) throw SolverDivergence("vanishing resultant: non-isolated solutions");
  for (double y1 : real_roots(res)) candidates_at(y1);
  return roots;
}

std::vector<Vec2> roots_by_multistart(const GeneratingFunction& f, BasePoint x,
                                      const SolverConfig& cfg) {
  std::vector<Vec2> roots;
  double w = cfg.scan_halfwidth;
  int n = cfg.scan_per_axis;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Vec2 y{-w + 2.0 * w * (i + 0.5) / n, -w + 2.0 * w * (j + 0.5) / n};
      if (!newton2d(f, x, y, cfg.newton_tol)) continue;
      if (std::abs(y.x) > 4 * w || std::abs(y.y) > 4 * w) continue;
      add_root(roots, y, cfg.merge_tol);
    }
  return roots;
}

}  // namespace

std::vector<FiberPoint> solve_gradient_system(const GeneratingFunction& f, BasePoint x,
                                              const SolverConfig& cfg) {
  std::vector<Vec2> roots = roots_by_multistart(f, x, cfg);
  // independent all-roots route; also catches roots the grid missed
  std::vector<Vec2> res_roots;
  try {
    res_roots = roots_by_resultant(f, x, cfg);
  } catch (const SolverDivergence&) {
    res_roots.clear();
  }
  for (Vec2 r : res_roots) add_root(roots, r, cfg.merge_tol);
  if (!res_roots.empty() && roots.size() != res_roots.size())
    throw SolverDivergence("root count mismatch between multi-start Newton and resultant");
  std::sort(roots.begin(), roots.end(), [](Vec2 a, Vec2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  return roots;
}

FiberData critical_points(const GeneratingFunction& f, BasePoint x, const SolverConfig& cfg) {
  if (!x.finite()) throw Error("critical_points: non-finite base point");
  std::vector<Vec2> roots = solve_gradient_system(f, x, cfg);

  FiberData fiber;
  fiber.base = x;
  for (Vec2 y : roots) {
    Mat2 h = f.hessian(y);
    if (std::abs(h.det()) < cfg.degenerate_tol)
      throw DegenerateFiber("degenerate Hessian at a critical point: base point too close to the caustic");
    CriticalPoint cp;
    cp.y = y;
    cp.hess_eigs = h.sym_eigenvalues();
    cp.morse_index = (cp.hess_eigs[0] < 0 ? 1 : 0) + (cp.hess_eigs[1] < 0 ? 1 : 0);
    cp.value = f.value_at(x, y);
    fiber.points.push_back(cp);
  }

  if (f.gradient_degree() == 2) {
    // two sheets off-caustic outside, four inside; anything else means the
    // solver lost a root
    int n = static_cast<int>(fiber.points.size());
    if (n != 2 && n != 4)
      throw SolverDivergence("unexpected root count " + std::to_string(n) +
                             " for a quadratic gradient system");
    int saddles = 0, nodes = 0, minima = 0;
    for (const auto& p : fiber.points) {
      saddles += p.morse_index == 1;
      nodes += p.morse_index == 2;
      minima += p.morse_index == 0;
    }
    if (n == 2 && saddles != 2)
      throw SolverDivergence("two-point fibre is not two saddles");
    if (n == 4 && !(saddles == 3 && nodes == 1))
      throw SolverDivergence("four-point fibre is not three saddles plus one index-2 point");
    fiber.inside_caustic = (n == 4);
  } else {
    fiber.inside_caustic = fiber.points.size() >= 4;
  }
  return fiber;
}

// --- continuation ------------------------------------------------------------

namespace {

struct TrackState {
  std::vector<CriticalPoint> pts;
};

double min_pair_distance(const std::vector<CriticalPoint>& pts, int* a = nullptr, int* b = nullptr) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      double d = (pts[i].y - pts[j].y).norm();
      if (d < best) {
        best = d;
        if (a) *a = static_cast<int>(i);
        if (b) *b = static_cast<int>(j);
      }
    }
  return best;
}

void reclassify(const GeneratingFunction& f, BasePoint x, CriticalPoint& p) {
  Mat2 h = f.hessian(p.y);
  p.hess_eigs = h.sym_eigenvalues();
  p.morse_index = (p.hess_eigs[0] < 0 ? 1 : 0) + (p.hess_eigs[1] < 0 ? 1 : 0);
  p.value = f.value_at(x, p.y);
}

// one predictor-corrector move of every tracked point; false when the step
// must be rejected
bool step_points(const GeneratingFunction& f, BasePoint x_new, std::vector<CriticalPoint>& pts,
                 Vec2 dx, double tol) {
  std::vector<CriticalPoint> trial = pts;
  for (auto& p : trial) {
    Mat2 h = f.hessian(p.y);
    if (std::abs(h.det()) < 1e-13) return false;
    p.y += h.inverse() * dx;  // tangent predictor: dy = H^-1 dx
    if (!newton2d(f, x_new, p.y, tol)) return false;
  }
  // corrections must not cross: each trial point stays nearest to its parent
  for (std::size_t i = 0; i < trial.size(); ++i) {
    for (std::size_t j = 0; j < trial.size(); ++j) {
      if (i == j) continue;
      if ((trial[i].y - pts[j].y).norm() < (trial[i].y - pts[i].y).norm()) return false;
    }
  }
  pts = std::move(trial);
  return true;
}

std::vector<CriticalPoint> continue_impl(const GeneratingFunction& f, BasePoint x_from,
                                         BasePoint x_to, std::vector<CriticalPoint> pts,
                                         const ContinuationConfig& cfg, bool allow_fold) {
  double t = 0.0;
  double h = cfg.initial_step;
  Vec2 path = x_to - x_from;
  if (path.norm() == 0.0) return pts;

  while (t < 1.0) {
    double step = std::min(h, 1.0 - t);
    BasePoint x_new = x_from + path * (t + step);
    std::vector<CriticalPoint> trial = pts;
    bool ok = step_points(f, x_new, trial, path * step, cfg.solver.newton_tol);
    if (ok) {
      int a = -1, b = -1;
      double d = min_pair_distance(trial, &a, &b);
      if (d < cfg.collision_tol) ok = false;
    }
    if (ok) {
      pts = std::move(trial);
      for (auto& p : pts) reclassify(f, x_from + path * (t + step), p);
      t += step;
      h = std::min(h * 1.6, 0.25);
      continue;
    }
    if (h > cfg.min_step) {
      h *= 0.5;
      continue;
    }
    // stuck: either a fold is being crossed or two sheets genuinely merge
    if (!allow_fold) throw SheetCollision("sheet continuation collided near the caustic");
    // re-solve slightly beyond the obstruction and match survivors
    double jump = std::min(1.0 - t, std::max(50.0 * cfg.min_step, 1e-4));
    BasePoint x_beyond = x_from + path * (t + jump);
    FiberData beyond = critical_points(f, x_beyond, cfg.solver);
    std::vector<CriticalPoint> matched;
    std::vector<bool> used(beyond.points.size(), false);
    for (const auto& p : pts) {
      int best = -1;
      double bd = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < beyond.points.size(); ++k) {
        if (used[k]) continue;
        double d = (beyond.points[k].y - p.y).norm();
        if (d < bd) { bd = d; best = static_cast<int>(k); }
      }
      if (best < 0) continue;
      // a sheet that moved far did not continue: it died at the fold
      if (bd > 0.2 * (1.0 + p.y.norm())) continue;
      used[static_cast<std::size_t>(best)] = true;
      CriticalPoint q = beyond.points[static_cast<std::size_t>(best)];
      q.label = p.label;
      matched.push_back(q);
    }
    // points born past a fold: the node gets its label, a born saddle takes
    // the unused saddle label
    for (std::size_t k = 0; k < beyond.points.size(); ++k) {
      if (used[k]) continue;
      CriticalPoint q = beyond.points[k];
      if (q.is_node()) {
        q.label = PointLabel::kNode;
      } else {
        bool has[3] = {false, false, false};
        for (const auto& m : matched)
          if (is_saddle_label(m.label)) has[saddle_slot(m.label)] = true;
        q.label = PointLabel::kUnlabeled;
        for (int s = 0; s < 3; ++s)
          if (!has[s]) { q.label = saddle_label(s); break; }
      }
      matched.push_back(q);
    }
    pts = std::move(matched);
    t += jump;
    h = cfg.initial_step;
  }
  return pts;
}

}  // namespace

std::vector<CriticalPoint> continue_points(const GeneratingFunction& f, BasePoint x_from,
                                           BasePoint x_to, std::vector<CriticalPoint> pts,
                                           const ContinuationConfig& cfg) {
  return continue_impl(f, x_from, x_to, std::move(pts), cfg, /*allow_fold=*/false);
}

std::vector<CriticalPoint> continue_points_across_fold(const GeneratingFunction& f,
                                                       BasePoint x_from, BasePoint x_to,
                                                       std::vector<CriticalPoint> pts,
                                                       const ContinuationConfig& cfg) {
  return continue_impl(f, x_from, x_to, std::move(pts), cfg, /*allow_fold=*/true);
}

FiberData label_reference_fiber(const GeneratingFunction& f, BasePoint x_ref,
                                const SolverConfig& cfg) {
  FiberData fiber = critical_points(f, x_ref, cfg);
  if (!fiber.inside_caustic || fiber.points.size() != 4)
    throw NotInsideCaustic("reference point must have a four-point fibre");
  const CriticalPoint* node = fiber.node();
  std::vector<CriticalPoint*> saddles;
  for (auto& p : fiber.points)
    if (p.is_saddle()) saddles.push_back(&p);
  std::sort(saddles.begin(), saddles.end(), [&](const CriticalPoint* a, const CriticalPoint* b) {
    return (a->y - node->y).angle() < (b->y - node->y).angle();
  });
  for (int s = 0; s < 3; ++s) saddles[static_cast<std::size_t>(s)]->label = saddle_label(s);
  for (auto& p : fiber.points)
    if (p.is_node()) p.label = PointLabel::kNode;
  return fiber;
}

FiberData transport_labels(const GeneratingFunction& f, const FiberData& reference,
                           FiberData fiber, const ContinuationConfig& cfg) {
  std::vector<CriticalPoint> moved =
      continue_points(f, reference.base, fiber.base, reference.points, cfg);
  if (moved.size() != fiber.points.size())
    throw LabelMismatch("transport_labels: fibre sizes differ after continuation");
  std::vector<bool> used(moved.size(), false);
  for (auto& p : fiber.points) {
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < moved.size(); ++k) {
      if (used[k]) continue;
      double d = (moved[k].y - p.y).norm();
      if (d < bd) { bd = d; best = static_cast<int>(k); }
    }
    double sep = min_pair_distance(moved);
    if (best < 0 || bd > 0.5 * sep)
      throw LabelMismatch("transport_labels: ambiguous point matching");
    used[static_cast<std::size_t>(best)] = true;
    p.label = moved[static_cast<std::size_t>(best)].label;
  }
  return fiber;
}

}  // namespace umbilic
