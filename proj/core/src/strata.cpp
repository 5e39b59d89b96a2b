#include "umbilic/strata.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>

namespace umbilic {

const char* to_string(WallKind k) {
  switch (k) {
    case WallKind::kFold: return "fold";
    case WallKind::kCusp: return "cusp";
    case WallKind::kBifurcation: return "bifurcation";
    case WallKind::kTwistLine: return "twist";
  }
  return "?";
}

const Wall* RegionGraph::wall(int id) const {
  if (id < 0 || id >= static_cast<int>(walls.size())) return nullptr;
  return &walls[static_cast<std::size_t>(id)];
}

const Region* RegionGraph::region(int id) const {
  if (id < 0 || id >= static_cast<int>(regions.size())) return nullptr;
  return &regions[static_cast<std::size_t>(id)];
}

int RegionGraph::region_of(BasePoint x) const {
  int best = -1;
  double bd = std::numeric_limits<double>::infinity();
  for (const auto& [p, r] : sample_index) {
    double d = (p - x).norm2();
    if (d < bd) { bd = d; best = r; }
  }
  return best;
}

// --- caustic tracing ---------------------------------------------------------

namespace {

double disc(const GeneratingFunction& f, Vec2 y) { return f.hessian(y).det(); }

Vec2 disc_grad(const GeneratingFunction& f, Vec2 y) {
  double h = 1e-6 * (1.0 + y.norm());
  return {(disc(f, {y.x + h, y.y}) - disc(f, {y.x - h, y.y})) / (2 * h),
          (disc(f, {y.x, y.y + h}) - disc(f, {y.x, y.y - h})) / (2 * h)};
}

bool disc_correct(const GeneratingFunction& f, Vec2& y, double tol) {
  for (int it = 0; it < 30; ++it) {
    double g = disc(f, y);
    Vec2 gr = disc_grad(f, y);
    double n2 = gr.norm2();
    if (n2 < 1e-30) return false;
    y -= gr * (g / n2);
    if (std::abs(disc(f, y)) < tol) return true;
  }
  return std::abs(disc(f, y)) < tol;
}

Vec2 kernel_dir(const GeneratingFunction& f, Vec2 y) {
  Mat2 h = f.hessian(y);
  auto ev = h.sym_eigenvalues();
  double lam = (std::abs(ev[0]) < std::abs(ev[1])) ? ev[0] : ev[1];
  return h.sym_eigenvector(lam);
}

std::optional<Vec2> find_disc_seed(const GeneratingFunction& f) {
  for (double scale : {4.0, 2.0, 1.0, 0.5, 0.25, 0.1, 0.05, 0.02, 0.01}) {
    const int n = 64;
    for (int i = 0; i <= n; ++i) {
      double prev = 0.0;
      for (int j = 0; j <= n; ++j) {
        Vec2 y{-scale + 2 * scale * i / n, -scale + 2 * scale * j / n};
        double g = disc(f, y);
        if (j > 0 && prev * g < 0) {
          Vec2 a{y.x, y.y - 2 * scale / n}, b = y;
          for (int it = 0; it < 60; ++it) {
            Vec2 m = (a + b) * 0.5;
            if (disc(f, a) * disc(f, m) <= 0) b = m; else a = m;
          }
          return (a + b) * 0.5;
        }
        prev = g;
      }
    }
  }
  return std::nullopt;
}

Vec2 project_to_polyline(Vec2 p, const Polyline& poly) {
  Vec2 best = poly.empty() ? p : poly[0];
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < poly.size(); ++k) {
    Vec2 a = poly[k], b = poly[k + 1], ab = b - a;
    double len2 = ab.norm2();
    double t = (len2 == 0.0) ? 0.0 : std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    Vec2 q = a + ab * t;
    double d = (p - q).norm2();
    if (d < bd) { bd = d; best = q; }
  }
  return best;
}

}  // namespace

CausticData trace_caustic(const GeneratingFunction& f, const CausticConfig& cfg) {
  CausticData out;
  std::optional<Vec2> seed = find_disc_seed(f);
  if (!seed) {
    // no sign change anywhere: the discriminant degenerates to a point
    Vec2 best{0, 0};
    double bv = std::abs(disc(f, best));
    for (double scale : {1.0, 0.1, 0.01}) {
      const int n = 40;
      for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) {
          Vec2 y{-scale + 2 * scale * i / n, -scale + 2 * scale * j / n};
          double v = std::abs(disc(f, y));
          if (v < bv) { bv = v; best = y; }
        }
    }
    out.degenerate = true;
    out.point = lagrangian_map(f, best);
    return out;
  }

  Vec2 y0 = *seed;
  double gscale = std::max(1e-12, disc_grad(f, y0).norm());
  if (!disc_correct(f, y0, cfg.newton_tol * gscale))
    throw OpenCurve("could not land on the discriminant curve");

  double scale0 = std::max(y0.norm(), 1e-3);
  double ds = cfg.step * scale0;

  Polyline ys{y0};
  Vec2 tangent = disc_grad(f, y0).perp().unit();
  Vec2 y = y0;
  bool closed = false;

  for (int k = 0; k < cfg.max_points; ++k) {
    Vec2 y_pred = y + tangent * ds;
    Vec2 y_corr = y_pred;
    if (!disc_correct(f, y_corr, cfg.newton_tol * gscale) ||
        (y_corr - y_pred).norm() > 0.5 * ds) {
      ds *= 0.5;
      if (ds < 1e-12 * scale0) throw OpenCurve("discriminant continuation stalled");
      continue;
    }
    Vec2 t_new = disc_grad(f, y_corr).perp().unit();
    if (t_new.dot(tangent) < 0) t_new = -t_new;
    double turn = std::asin(std::clamp(tangent.cross(t_new), -1.0, 1.0));
    if (std::abs(turn) > 0.3) { ds *= 0.5; continue; }

    y = y_corr;
    tangent = t_new;
    ys.push_back(y);
    if (std::abs(turn) < 0.05) ds = std::min(ds * 1.4, cfg.step * scale0 * 2.0);
    if (ys.size() > 8 && (y - y0).norm() < ds) { closed = true; break; }
  }
  if (!closed) throw OpenCurve("discriminant trace did not close");
  ys.push_back(y0);

  out.preimage = ys;
  out.curve.reserve(ys.size());
  for (Vec2 p : ys) out.curve.push_back(lagrangian_map(f, p));

  Vec2 centroid{0, 0};
  for (std::size_t i = 0; i + 1 < out.curve.size(); ++i) centroid += out.curve[i];
  centroid = centroid / static_cast<double>(out.curve.size() - 1);

  // cusps: the Hessian kernel line crosses the curve tangent
  std::vector<Vec2> tangents(ys.size() - 1);
  std::vector<double> psis(ys.size() - 1);
  Vec2 k_prev = kernel_dir(f, ys[0]);
  for (std::size_t i = 0; i + 1 < ys.size(); ++i) {
    tangents[i] = (ys[i + 1] - ys[i]).unit();
    Vec2 kd = kernel_dir(f, ys[i]);
    if (kd.dot(k_prev) < 0) kd = -kd;
    k_prev = kd;
    psis[i] = kd.cross(tangents[i]);
  }
  int cusp_id = 0;
  for (std::size_t i = 0; i + 1 < psis.size(); ++i) {
    if (psis[i] == 0.0 || psis[i] * psis[i + 1] > 0) continue;
    Vec2 a = ys[i], b = ys[i + 1];
    Vec2 ka = kernel_dir(f, a);
    for (int it = 0; it < 60; ++it) {
      Vec2 m = (a + b) * 0.5;
      disc_correct(f, m, cfg.newton_tol * gscale);
      Vec2 km = kernel_dir(f, m);
      if (km.dot(ka) < 0) km = -km;
      Vec2 tm = (b - a).unit();
      if ((ka.cross(tm)) * (km.cross(tm)) <= 0) b = m;
      else { a = m; ka = km; }
    }
    Vec2 yc = (a + b) * 0.5;
    Cusp c;
    c.id = cusp_id++;
    c.pos = lagrangian_map(f, yc);
    Vec2 u = f.hessian(ys[i]) * tangents[i];
    if (u.norm() < 1e-14) u = f.hessian(ys[i + 1]) * tangents[i + 1];
    u = u.unit();
    if (u.dot(c.pos - centroid) < 0) u = -u;
    c.axis = u;
    out.cusps.push_back(c);
  }
  return out;
}

// --- twist lines -------------------------------------------------------------

void install_twist_lines(RegionGraph& graph, const StrataConfig& cfg) {
  (void)cfg;
  if (graph.caustic.degenerate) return;
  if (graph.caustic.cusps.size() != 3)
    throw PlacementConflict("twist lines need exactly three cusps");
  const double diag = std::hypot(graph.window.width(), graph.window.height());
  for (auto& cusp : graph.caustic.cusps) {
    bool placed = false;
    for (double rot : {0.0, 0.05, -0.05, 0.12, -0.12, 0.25, -0.25}) {
      double ca = std::cos(rot), sa = std::sin(rot);
      Vec2 dir{cusp.axis.x * ca - cusp.axis.y * sa, cusp.axis.x * sa + cusp.axis.y * ca};
      Polyline ray;
      const int segs = 64;
      for (int k = 0; k <= segs; ++k) {
        Vec2 p = cusp.pos + dir * (diag * k / segs);
        ray.push_back(p);
        if (!graph.window.contains(p) && k > 0) break;
      }
      // the ray must clear the caustic and the other twist rays away from
      // its vertex
      Vec2 off = cusp.pos + dir * (1e-7 * diag);
      bool clear = !segment_hits_polyline(off, ray.back(), graph.caustic.curve);
      for (const Wall& w : graph.walls)
        if (w.kind == WallKind::kTwistLine &&
            segment_hits_polyline(cusp.pos, ray.back(), w.polyline))
          clear = false;
      if (!clear) continue;
      Wall w;
      w.id = static_cast<int>(graph.walls.size());
      w.kind = WallKind::kTwistLine;
      w.polyline = std::move(ray);
      w.cusp_id = cusp.id;
      graph.walls.push_back(std::move(w));
      placed = true;
      break;
    }
    if (!placed) throw PlacementConflict("no clear outward ray at a cusp");
  }
}

// --- scan machinery ----------------------------------------------------------

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[static_cast<std::size_t>(a)] != a) {
      parent[static_cast<std::size_t>(a)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
      a = parent[static_cast<std::size_t>(a)];
    }
    return a;
  }
  void unite(int a, int b) {
    a = find(a); b = find(b);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
};

struct Sample {
  BasePoint x;
  FiberData fiber;
  FlowSignature sig;
  bool valid = false;
  double step = 0.0;
  int comp = -1;
};

struct WallPoint {
  BasePoint pos;
  int sample_a = -1, sample_b = -1;
  double step = 0.0;
};

// incidence equality under proximity matching (detector one)
bool incidence_equal(const FlowSignature& sa, const FiberData& fa, const FlowSignature& sb,
                     const FiberData& fb) {
  auto node_hits = [](const FlowSignature& s, const FiberData& fd) {
    std::vector<std::pair<double, int>> keyed;  // (angle key of saddle, hit)
    std::size_t k = 0;
    for (const auto& p : fd.points) {
      if (!p.is_saddle()) continue;
      int hit = 0;
      for (const Terminal& t : s.saddles[k].stable)
        if (t.kind == TerminalKind::kConverged &&
            fd.points[static_cast<std::size_t>(t.point_index)].is_node())
          hit = 1;
      keyed.push_back({0.0, hit});
      ++k;
    }
    return keyed;
  };
  // align saddles of the two fibres by proximity
  std::vector<int> hits_a, hits_b;
  {
    std::size_t k = 0;
    for (const auto& p : fa.points) {
      if (!p.is_saddle()) continue;
      int hit = 0;
      for (const Terminal& t : sa.saddles[k].stable)
        if (t.kind == TerminalKind::kConverged &&
            fa.points[static_cast<std::size_t>(t.point_index)].is_node())
          hit = 1;
      ++k;
      // match this saddle into fb
      double bd = std::numeric_limits<double>::infinity();
      std::size_t kb = 0, pick = 0;
      for (const auto& q : fb.points) {
        if (!q.is_saddle()) continue;
        double d = (p.y - q.y).norm();
        if (d < bd) { bd = d; pick = kb; }
        ++kb;
      }
      int hitb = 0;
      for (const Terminal& t : sb.saddles[pick].stable)
        if (t.kind == TerminalKind::kConverged &&
            fb.points[static_cast<std::size_t>(t.point_index)].is_node())
          hitb = 1;
      hits_a.push_back(hit);
      hits_b.push_back(hitb);
    }
  }
  (void)node_hits;
  return hits_a == hits_b;
}

struct Scan {
  const GeneratingFunction& f;
  const StrataConfig& cfg;
  SectorDecomposition sectors;
  std::vector<Polyline> barriers;

  std::vector<Sample> samples;
  std::vector<std::pair<int, int>> edges;

  Scan(const GeneratingFunction& fn, const StrataConfig& c)
      : f(fn), cfg(c), sectors(asymptotic_sectors(fn)) {}

  bool classify(BasePoint x, FiberData& fiber, FlowSignature& sig) const {
    try {
      fiber = critical_points(f, x, cfg.solver);
      sig = flow_signature(f, fiber, cfg.flow, sectors);
      return !sig.ambiguous;
    } catch (const DegenerateFiber&) {
    } catch (const SolverDivergence&) {
    }
    return false;
  }

  bool crosses_barrier(Vec2 a, Vec2 b) const {
    for (const Polyline& p : barriers)
      if (segment_hits_polyline(a, b, p)) return true;
    return false;
  }

  void add_lattice(Window w, int n, bool skip_fine_zone, Window fine_zone) {
    double sx = w.width() / n, sy = w.height() / n;
    double step = std::max(sx, sy);
    std::vector<std::vector<int>> idx(static_cast<std::size_t>(n + 1),
                                      std::vector<int>(static_cast<std::size_t>(n + 1), -1));
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) {
        BasePoint x{w.lo.x + sx * i, w.lo.y + sy * j};
        if (skip_fine_zone && fine_zone.contains(x)) continue;
        Sample s;
        s.x = x;
        s.step = step;
        s.valid = classify(x, s.fiber, s.sig);
        idx[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            static_cast<int>(samples.size());
        samples.push_back(std::move(s));
      }
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) {
        int a = idx[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        if (a < 0) continue;
        if (i < n) {
          int b = idx[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(j)];
          if (b >= 0) edges.push_back({a, b});
        }
        if (j < n) {
          int b = idx[static_cast<std::size_t>(i)][static_cast<std::size_t>(j + 1)];
          if (b >= 0) edges.push_back({a, b});
        }
      }
  }

  void stitch(double reach) {
    std::vector<int> fine, coarse;
    double fstep = std::numeric_limits<double>::infinity();
    for (const Sample& s : samples) fstep = std::min(fstep, s.step);
    for (std::size_t i = 0; i < samples.size(); ++i)
      ((samples[i].step == fstep) ? fine : coarse).push_back(static_cast<int>(i));
    for (int a : fine)
      for (int b : coarse) {
        double d = (samples[static_cast<std::size_t>(a)].x - samples[static_cast<std::size_t>(b)].x).norm();
        if (d <= reach * samples[static_cast<std::size_t>(b)].step) edges.push_back({a, b});
      }
  }

  bool edge_same_region(const Sample& a, const Sample& b) const {
    if (!a.valid || !b.valid) return false;
    if (crosses_barrier(a.x, b.x)) return false;
    return signatures_match(a.sig, a.fiber, b.sig, b.fiber);
  }

  std::optional<BasePoint> bisect(const Sample& a, const Sample& b, double tol) const {
    BasePoint lo = a.x, hi = b.x;
    FiberData f_lo = a.fiber, f_hi = b.fiber;
    FlowSignature s_lo = a.sig, s_hi = b.sig;
    int stall = 0;
    while ((hi - lo).norm() > tol) {
      BasePoint m = (lo + hi) * 0.5;
      FiberData fm;
      FlowSignature sm;
      if (!classify(m, fm, sm)) {
        if (++stall > 4) return (lo + hi) * 0.5;
        m += (hi - lo).perp().unit() * ((hi - lo).norm() * 0.05);
        if (!classify(m, fm, sm)) return (lo + hi) * 0.5;
      }
      if (signatures_match(sm, fm, s_lo, f_lo)) { lo = m; f_lo = fm; s_lo = sm; }
      else if (signatures_match(sm, fm, s_hi, f_hi)) { hi = m; f_hi = fm; s_hi = sm; }
      else return (lo + hi) * 0.5;
    }
    return (lo + hi) * 0.5;
  }

  std::optional<BasePoint> bisect_incidence(const Sample& a, const Sample& b, double tol) const {
    if (!a.sig.inside || !b.sig.inside) return std::nullopt;
    if (incidence_equal(a.sig, a.fiber, b.sig, b.fiber)) return std::nullopt;
    BasePoint lo = a.x, hi = b.x;
    FiberData f_lo = a.fiber, f_hi = b.fiber;
    FlowSignature s_lo = a.sig, s_hi = b.sig;
    while ((hi - lo).norm() > tol) {
      BasePoint m = (lo + hi) * 0.5;
      FiberData fm;
      FlowSignature sm;
      if (!classify(m, fm, sm)) return (lo + hi) * 0.5;
      if (incidence_equal(sm, fm, s_lo, f_lo)) { lo = m; f_lo = fm; s_lo = sm; }
      else { hi = m; f_hi = fm; s_hi = sm; }
    }
    return (lo + hi) * 0.5;
  }
};

std::vector<std::vector<int>> chain_points(const std::vector<WallPoint>& pts, double gap_factor) {
  std::vector<std::vector<int>> chains;
  std::vector<bool> used(pts.size(), false);
  for (std::size_t start = 0; start < pts.size(); ++start) {
    if (used[start]) continue;
    std::vector<int> chain{static_cast<int>(start)};
    used[start] = true;
    for (int end = 0; end < 2; ++end) {
      while (true) {
        int tip = (end == 0) ? chain.back() : chain.front();
        double best = std::numeric_limits<double>::infinity();
        int pick = -1;
        for (std::size_t k = 0; k < pts.size(); ++k) {
          if (used[k]) continue;
          double d = (pts[k].pos - pts[static_cast<std::size_t>(tip)].pos).norm();
          if (d < best) { best = d; pick = static_cast<int>(k); }
        }
        if (pick < 0) break;
        double gap = gap_factor * std::max(pts[static_cast<std::size_t>(tip)].step,
                                           pts[static_cast<std::size_t>(pick)].step);
        if (best > gap) break;
        used[static_cast<std::size_t>(pick)] = true;
        if (end == 0) chain.push_back(pick);
        else chain.insert(chain.begin(), pick);
      }
    }
    chains.push_back(std::move(chain));
  }
  return chains;
}

Window caustic_zone(const CausticData& c, Window window, double factor) {
  if (c.degenerate) {
    double r = std::min(window.width(), window.height()) / 16.0;
    return {{c.point.x - r, c.point.y - r}, {c.point.x + r, c.point.y + r}};
  }
  Vec2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  Vec2 hi = -lo;
  for (Vec2 p : c.curve) {
    lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y);
    hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y);
  }
  Vec2 mid = (lo + hi) * 0.5;
  double h = std::max(hi.x - lo.x, hi.y - lo.y) * 0.5 * factor;
  Window z{{mid.x - h, mid.y - h}, {mid.x + h, mid.y + h}};
  z.lo.x = std::max(z.lo.x, window.lo.x); z.lo.y = std::max(z.lo.y, window.lo.y);
  z.hi.x = std::min(z.hi.x, window.hi.x); z.hi.y = std::min(z.hi.y, window.hi.y);
  return z;
}

}  // namespace

// defined in monodromy.cpp: resolves deferred taus and outside-wall
// orientations through the identity constraints around codimension-2 points
void resolve_glue_constraints(RegionGraph& graph, const StrataConfig& cfg);

namespace {

// label transport within the assembled graph, plus incidence/dying/cusp data
void finalize_region_data(RegionGraph& graph, const StrataConfig& cfg) {
  const GeneratingFunction& f = graph.f;
  SectorDecomposition sectors = asymptotic_sectors(f);
  ContinuationConfig ccfg;
  ccfg.solver = cfg.solver;

  // ---- pick the labelling anchor: the inside region with best clearance
  int anchor = -1;
  double best = -1.0;
  for (const Region& r : graph.regions)
    if (r.inside && r.clearance > best) { best = r.clearance; anchor = r.id; }

  std::vector<FiberData> fibers(graph.regions.size());
  std::vector<bool> labelled(graph.regions.size(), false);

  if (anchor >= 0) {
    fibers[static_cast<std::size_t>(anchor)] =
        label_reference_fiber(f, graph.regions[static_cast<std::size_t>(anchor)].rep, cfg.solver);
    labelled[static_cast<std::size_t>(anchor)] = true;
  } else {
    // no inside region (degenerate caustic): label the outside fibres at
    // every region independently, in value order
    for (Region& r : graph.regions) {
      FiberData fd = critical_points(f, r.rep, cfg.solver);
      std::vector<CriticalPoint*> sads;
      for (auto& p : fd.points) sads.push_back(&p);
      std::sort(sads.begin(), sads.end(), [](auto* a, auto* b) { return a->value < b->value; });
      for (std::size_t k = 0; k < sads.size() && k < 2; ++k)
        sads[k]->label = saddle_label(static_cast<int>(k));
      fibers[static_cast<std::size_t>(r.id)] = fd;
      labelled[static_cast<std::size_t>(r.id)] = true;
    }
  }

  // ---- label transport over the adjacency graph, never across twist lines
  auto transport_across = [&](int wall_id, int from, int to) -> std::optional<FiberData> {
    const Wall& w = *graph.wall(wall_id);
    if (w.polyline.size() < 2) return std::nullopt;
    std::size_t mid = w.polyline.size() / 2;
    if (mid + 1 >= w.polyline.size()) mid = w.polyline.size() - 2;
    Vec2 t = (w.polyline[mid + 1] - w.polyline[mid]).unit();
    Vec2 nrm = t.perp();
    Vec2 m = (w.polyline[mid + 1] + w.polyline[mid]) * 0.5;
    // offsets on the from/to sides
    double off = 2.0 * cfg.bisect_tol + 1e-3 * (graph.regions[static_cast<std::size_t>(from)].rep - m).norm();
    Vec2 m_from = m + nrm * off, m_to = m - nrm * off;
    if (graph.region_of(m_from) != from) std::swap(m_from, m_to);
    if (graph.region_of(m_from) != from || graph.region_of(m_to) != to) return std::nullopt;

    const FiberData& src = fibers[static_cast<std::size_t>(from)];
    try {
      std::vector<CriticalPoint> pts = src.points;
      pts = continue_points(f, src.base, m_from, std::move(pts), ccfg);
      pts = continue_points_across_fold(f, m_from, m_to, std::move(pts), ccfg);
      pts = continue_points(f, m_to, graph.regions[static_cast<std::size_t>(to)].rep,
                            std::move(pts), ccfg);
      FiberData out = critical_points(f, graph.regions[static_cast<std::size_t>(to)].rep, cfg.solver);
      // adopt labels by proximity
      for (auto& p : out.points) {
        double bd = std::numeric_limits<double>::infinity();
        const CriticalPoint* pick = nullptr;
        for (const auto& q : pts) {
          double d = (q.y - p.y).norm();
          if (d < bd) { bd = d; pick = &q; }
        }
        if (pick) p.label = pick->label;
      }
      return out;
    } catch (const Error&) {
      return std::nullopt;
    }
  };

  // breadth-first transport
  std::vector<int> queue;
  for (std::size_t r = 0; r < graph.regions.size(); ++r)
    if (labelled[r]) queue.push_back(static_cast<int>(r));
  std::size_t head = 0;
  while (head < queue.size()) {
    int u = queue[head++];
    for (const Wall& w : graph.walls) {
      if (w.kind == WallKind::kTwistLine) continue;
      int v = -1;
      if (w.left_region == u && w.right_region >= 0) v = w.right_region;
      else if (w.right_region == u && w.left_region >= 0) v = w.left_region;
      if (v < 0 || labelled[static_cast<std::size_t>(v)]) continue;
      auto fd = transport_across(w.id, u, v);
      if (!fd) continue;
      fibers[static_cast<std::size_t>(v)] = *fd;
      labelled[static_cast<std::size_t>(v)] = true;
      queue.push_back(v);
    }
  }
  for (std::size_t r = 0; r < graph.regions.size(); ++r)
    if (!labelled[r]) throw ArrangementFailure("region unreachable for label transport");

  // ---- store labels and incidences
  for (Region& r : graph.regions) {
    const FiberData& fd = fibers[static_cast<std::size_t>(r.id)];
    r.labels.clear();
    for (const auto& p : fd.points)
      if (p.is_saddle() && is_saddle_label(p.label)) r.labels.push_back(p.label);
    std::sort(r.labels.begin(), r.labels.end());
    if (r.inside) r.incidence = incidence_matrix(f, fd, cfg.flow, sectors);
  }

  // ---- fold arcs: dying labels from the merging pair just inside
  for (Wall& w : graph.walls) {
    if (w.kind != WallKind::kFold) continue;
    int inside_region =
        (w.left_region >= 0 && graph.regions[static_cast<std::size_t>(w.left_region)].inside)
            ? w.left_region
            : w.right_region;
    if (inside_region < 0 || !graph.regions[static_cast<std::size_t>(inside_region)].inside) {
      // the unperturbed point caustic has no inside; leave unlabelled
      continue;
    }
    std::size_t mid = w.polyline.size() / 2;
    if (mid + 1 >= w.polyline.size()) mid = w.polyline.size() - 2;
    Vec2 m = (w.polyline[mid + 1] + w.polyline[mid]) * 0.5;
    const FiberData& ref = fibers[static_cast<std::size_t>(inside_region)];
    // walk from the inside representative toward the arc midpoint, stopping
    // short of the fold, and read off the pair about to merge
    Vec2 dir = m - ref.base;
    BasePoint probe = ref.base + dir * 0.9;
    try {
      std::vector<CriticalPoint> pts =
          continue_points(f, ref.base, probe, ref.points, ccfg);
      const CriticalPoint* node = nullptr;
      for (const auto& p : pts)
        if (p.is_node()) node = &p;
      if (!node) continue;
      double bd = std::numeric_limits<double>::infinity();
      PointLabel dying = PointLabel::kUnlabeled;
      for (const auto& p : pts) {
        if (!p.is_saddle()) continue;
        double d = (p.y - node->y).norm();
        if (d < bd) { bd = d; dying = p.label; }
      }
      w.dying = dying;
    } catch (const Error&) {
      // probed too far; try the three-quarter point
      try {
        std::vector<CriticalPoint> pts =
            continue_points(f, ref.base, ref.base + dir * 0.75, ref.points, ccfg);
        const CriticalPoint* node = nullptr;
        for (const auto& p : pts)
          if (p.is_node()) node = &p;
        if (!node) continue;
        double bd = std::numeric_limits<double>::infinity();
        for (const auto& p : pts) {
          if (!p.is_saddle()) continue;
          double d = (p.y - node->y).norm();
          if (d < bd) { bd = d; w.dying = p.label; }
        }
      } catch (const Error&) {
      }
    }
  }

  // ---- cusp data: merging pair from the two adjacent arcs, case from the
  // incidence of the inside region next to the cusp
  for (Cusp& c : graph.caustic.cusps) {
    std::vector<std::pair<double, int>> close;  // (distance of arc endpoint, wall id)
    for (const Wall& w : graph.walls) {
      if (w.kind != WallKind::kFold || w.polyline.empty()) continue;
      double d = std::min((w.polyline.front() - c.pos).norm(), (w.polyline.back() - c.pos).norm());
      close.push_back({d, w.id});
    }
    std::sort(close.begin(), close.end());
    if (close.size() < 2) throw ArrangementFailure("cusp without two adjacent fold arcs");
    const Wall* wa = graph.wall(close[0].second);
    const Wall* wb = graph.wall(close[1].second);
    if (!is_saddle_label(wa->dying) || !is_saddle_label(wb->dying) || wa->dying == wb->dying)
      throw ArrangementFailure("inconsistent dying labels at a cusp");
    PointLabel m0 = std::min(wa->dying, wb->dying);
    PointLabel m1 = std::max(wa->dying, wb->dying);
    c.merging = {m0, m1};
    c.arcs = {(m0 == wa->dying) ? wa->id : wb->id, (m1 == wb->dying) ? wb->id : wa->id};

    int rid = -1;
    for (double back : {4.0, 8.0, 16.0}) {
      BasePoint probe = c.pos - c.axis * (back * cfg.bisect_tol * 50.0);
      rid = graph.region_of(probe);
      if (rid >= 0 && graph.regions[static_cast<std::size_t>(rid)].inside) break;
      rid = -1;
    }
    if (rid < 0) {
      // fall back to the nearest inside region representative
      double bd = std::numeric_limits<double>::infinity();
      for (const Region& r : graph.regions) {
        if (!r.inside) continue;
        double d = (r.rep - c.pos).norm();
        if (d < bd) { bd = d; rid = r.id; }
      }
    }
    if (rid < 0) throw ArrangementFailure("no inside region next to a cusp");
    const IncidenceMatrix& I = *graph.regions[static_cast<std::size_t>(rid)].incidence;
    int far = 3 - saddle_slot(m0) - saddle_slot(m1);
    if (I[saddle_slot(m0)] != 1 || I[saddle_slot(m1)] != 1)
      throw UnknownCase("cusp saddles without node lines nearby");
    c.c = (I[far] == 0) ? CuspCase::kB : CuspCase::kA;
  }

  // ---- bifurcation walls: separatrix pair and tau where determined
  for (Wall& w : graph.walls) {
    if (w.kind != WallKind::kBifurcation) continue;
    if (w.left_region < 0 || w.right_region < 0) continue;
    const Region& L = graph.regions[static_cast<std::size_t>(w.left_region)];
    const Region& R = graph.regions[static_cast<std::size_t>(w.right_region)];
    if (!L.inside || !R.inside) continue;  // outside walls resolved later
    const IncidenceMatrix& IL = *L.incidence;
    const IncidenceMatrix& IR = *R.incidence;

    // separatrix probe at the wall midpoint
    std::size_t mid = w.polyline.size() / 2;
    BasePoint m = w.polyline[std::min(mid, w.polyline.size() - 1)];
    int src_slot = -1, dst_slot = -1;
    try {
      FiberData fd = critical_points(f, m, cfg.solver);
      fd = transport_labels(f, fibers[static_cast<std::size_t>(R.id)], fd, ccfg);
      double bd = std::numeric_limits<double>::infinity();
      for (const auto& p : fd.points) {
        if (!p.is_saddle()) continue;
        SeparatrixSet set = saddle_separatrices(f, fd, p, cfg.flow);
        for (const Trajectory& tr : set.unstable) {
          for (const auto& q : fd.points) {
            if (!q.is_saddle() || &q == &p) continue;
            double dmin = std::numeric_limits<double>::infinity();
            for (Vec2 s : tr.samples) dmin = std::min(dmin, (s - q.y).norm());
            if (dmin < bd) {
              bd = dmin;
              src_slot = saddle_slot(p.label) + 1;
              dst_slot = saddle_slot(q.label) + 1;
            }
          }
        }
      }
    } catch (const Error&) {
    }

    int flip = -1, flips = 0;
    for (int k = 0; k < 3; ++k)
      if (IL[k] != IR[k]) { flip = k + 1; ++flips; }
    if (flips > 1) throw ArrangementFailure("incidence jump of two entries across one wall");

    if (flips == 1) {
      w.pair_i = flip;
      w.pair_j = (dst_slot == flip && src_slot > 0)
                     ? src_slot
                     : (src_slot == flip && dst_slot > 0 ? dst_slot : 0);
      if (w.pair_j == 0) {
        // probe failed; the other saddle of the pair is whichever carries a
        // node line on both sides
        for (int k = 1; k <= 3; ++k)
          if (k != flip && IL[k - 1] == 1 && IR[k - 1] == 1) { w.pair_j = k; break; }
      }
      WallMatrixResult wm = wall_matrix(IR, IL, w.pair_i, w.pair_j);
      w.tau = wm.tau;
      w.tau_defaulted = false;
    } else {
      // equal incidences: pair from the probe, tau by the constraint pass
      if (src_slot > 0 && dst_slot > 0) {
        w.pair_i = dst_slot;
        w.pair_j = src_slot;
      }
      w.tau_defaulted = true;
    }
  }

  // ---- snap bifurcation endpoints onto the caustic where they approach it
  if (!graph.caustic.degenerate) {
    for (Wall& w : graph.walls) {
      if (w.kind != WallKind::kBifurcation || w.polyline.size() < 2) continue;
      for (int end = 0; end < 2; ++end) {
        Vec2& p = (end == 0) ? w.polyline.front() : w.polyline.back();
        Vec2 q = project_to_polyline(p, graph.caustic.curve);
        double local = (end == 0) ? (w.polyline[1] - w.polyline[0]).norm()
                                  : (w.polyline[w.polyline.size() - 2] - w.polyline.back()).norm();
        if ((q - p).norm() < 6.0 * std::max(local, cfg.bisect_tol)) {
          if (end == 0) w.polyline.insert(w.polyline.begin(), q);
          else w.polyline.push_back(q);
        }
      }
    }
  }

  resolve_glue_constraints(graph, cfg);
}

}  // namespace

std::vector<Polyline> locate_bifurcation_walls(const GeneratingFunction& f,
                                               const StrataConfig& cfg) {
  RegionGraph g = build_region_graph(f, cfg);
  std::vector<Polyline> out;
  for (const Wall& w : g.walls)
    if (w.kind == WallKind::kBifurcation) out.push_back(w.polyline);
  return out;
}

RegionGraph build_region_graph(const GeneratingFunction& f, const StrataConfig& cfg) {
  RegionGraph graph;
  graph.f = f;
  graph.window = cfg.window;
  graph.caustic = trace_caustic(f, cfg.caustic);

  // fold arcs split at cusps become walls up front, then the twist rays, so
  // the scan can use both as region barriers
  if (!graph.caustic.degenerate) {
    const Polyline& curve = graph.caustic.curve;
    std::vector<Cusp>& cusps = graph.caustic.cusps;
    if (!cusps.empty()) {
      std::vector<std::pair<std::size_t, int>> marks;
      for (const Cusp& c : cusps) marks.push_back({nearest_vertex(c.pos, curve), c.id});
      std::sort(marks.begin(), marks.end());
      for (std::size_t m = 0; m < marks.size(); ++m) {
        std::size_t from = marks[m].first;
        std::size_t to = marks[(m + 1) % marks.size()].first;
        Polyline arc;
        if (from <= to) {
          arc.assign(curve.begin() + static_cast<std::ptrdiff_t>(from),
                     curve.begin() + static_cast<std::ptrdiff_t>(to) + 1);
        } else {
          arc.assign(curve.begin() + static_cast<std::ptrdiff_t>(from), curve.end());
          arc.insert(arc.end(), curve.begin() + 1,
                     curve.begin() + static_cast<std::ptrdiff_t>(to) + 1);
        }
        Wall w;
        w.id = static_cast<int>(graph.walls.size());
        w.kind = WallKind::kFold;
        w.polyline = std::move(arc);
        graph.walls.push_back(std::move(w));
      }
    } else {
      Wall w;
      w.id = 0;
      w.kind = WallKind::kFold;
      w.polyline = curve;
      graph.walls.push_back(std::move(w));
    }
    install_twist_lines(graph, cfg);
  }

  Scan scan(f, cfg);
  if (!graph.caustic.degenerate) scan.barriers.push_back(graph.caustic.curve);
  for (const Wall& w : graph.walls)
    if (w.kind == WallKind::kTwistLine) scan.barriers.push_back(w.polyline);

  Window zone = caustic_zone(graph.caustic, cfg.window, cfg.fine_zone_factor);
  scan.add_lattice(zone, cfg.fine_grid, false, zone);
  scan.add_lattice(cfg.window, cfg.coarse_grid, true, zone);
  scan.stitch(1.6);

  UnionFind uf(scan.samples.size());
  for (auto [a, b] : scan.edges)
    if (scan.edge_same_region(scan.samples[static_cast<std::size_t>(a)],
                              scan.samples[static_cast<std::size_t>(b)]))
      uf.unite(a, b);

  // wall points from signature-changing edges with equal inside flags
  std::vector<WallPoint> wall_points;
  for (auto [a, b] : scan.edges) {
    const Sample& sa = scan.samples[static_cast<std::size_t>(a)];
    const Sample& sb = scan.samples[static_cast<std::size_t>(b)];
    if (!sa.valid || !sb.valid) continue;
    if (sa.sig.inside != sb.sig.inside) continue;  // fold: traced exactly already
    if (scan.crosses_barrier(sa.x, sb.x)) continue;
    if (signatures_match(sa.sig, sa.fiber, sb.sig, sb.fiber)) continue;
    auto p = scan.bisect(sa, sb, cfg.bisect_tol);
    if (!p) continue;
    WallPoint wp;
    wp.pos = *p;
    wp.sample_a = a;
    wp.sample_b = b;
    wp.step = std::max(sa.step, sb.step);
    wall_points.push_back(wp);

    // both detectors must localize the wall at the same spot
    if (sa.sig.inside && sb.sig.inside) {
      auto q = scan.bisect_incidence(sa, sb, cfg.bisect_tol);
      if (q && (*q - *p).norm() > 100.0 * cfg.bisect_tol)
        throw UnresolvedWall("incidence and branch detectors disagree on a wall position");
    }
  }

  std::map<std::pair<int, int>, std::vector<WallPoint>> by_pair;
  for (const WallPoint& wp : wall_points) {
    int ca = uf.find(wp.sample_a), cb = uf.find(wp.sample_b);
    by_pair[{std::min(ca, cb), std::max(ca, cb)}].push_back(wp);
  }

  std::map<int, int> comp_to_region;
  for (std::size_t i = 0; i < scan.samples.size(); ++i) {
    if (!scan.samples[i].valid) continue;
    int c = uf.find(static_cast<int>(i));
    if (!comp_to_region.count(c)) comp_to_region[c] = static_cast<int>(comp_to_region.size());
  }

  graph.regions.resize(comp_to_region.size());
  for (auto [comp, rid] : comp_to_region) {
    Region& r = graph.regions[static_cast<std::size_t>(rid)];
    r.id = rid;
    r.inside = scan.samples[static_cast<std::size_t>(comp)].sig.inside;
  }
  for (std::size_t i = 0; i < scan.samples.size(); ++i) {
    Sample& s = scan.samples[i];
    if (!s.valid) continue;
    s.comp = comp_to_region[uf.find(static_cast<int>(i))];
    graph.sample_index.push_back({s.x, s.comp});
  }

  for (auto& [pair, pts] : by_pair) {
    for (const auto& chain : chain_points(pts, cfg.wall_gap)) {
      if (chain.size() < 2) continue;
      Wall w;
      w.id = static_cast<int>(graph.walls.size());
      w.kind = WallKind::kBifurcation;
      for (int idx : chain) w.polyline.push_back(pts[static_cast<std::size_t>(idx)].pos);
      const WallPoint& wp = pts[static_cast<std::size_t>(chain[chain.size() / 2])];
      Vec2 t = (w.polyline.back() - w.polyline.front()).unit();
      Vec2 to_a = scan.samples[static_cast<std::size_t>(wp.sample_a)].x - wp.pos;
      int ca = comp_to_region[uf.find(wp.sample_a)];
      int cb = comp_to_region[uf.find(wp.sample_b)];
      if (t.cross(to_a) > 0) { w.left_region = ca; w.right_region = cb; }
      else { w.left_region = cb; w.right_region = ca; }
      graph.walls.push_back(std::move(w));
    }
  }

  // representatives: best wall clearance within each region
  std::vector<double> best(graph.regions.size(), -1.0);
  for (const Sample& s : scan.samples) {
    if (!s.valid || s.comp < 0) continue;
    double cl = std::numeric_limits<double>::infinity();
    for (const Wall& w : graph.walls)
      cl = std::min(cl, point_polyline_distance(s.x, w.polyline));
    if (cl > best[static_cast<std::size_t>(s.comp)]) {
      best[static_cast<std::size_t>(s.comp)] = cl;
      graph.regions[static_cast<std::size_t>(s.comp)].rep = s.x;
      graph.regions[static_cast<std::size_t>(s.comp)].clearance = cl;
    }
  }

  // fold and twist adjacency from offset probes at segment midpoints
  for (Wall& w : graph.walls) {
    if (w.kind != WallKind::kFold && w.kind != WallKind::kTwistLine) continue;
    if (w.polyline.size() < 2) continue;
    std::size_t mid = w.polyline.size() / 2;
    if (mid + 1 >= w.polyline.size()) mid = w.polyline.size() - 2;
    Vec2 t = (w.polyline[mid + 1] - w.polyline[mid]).unit();
    Vec2 nrm = t.perp();
    Vec2 m = (w.polyline[mid + 1] + w.polyline[mid]) * 0.5;
    // probe at increasing offsets until both sides land in regions
    for (double mult : {1.0, 2.0, 4.0, 8.0}) {
      double off = mult * 0.75 * (w.kind == WallKind::kFold
                                      ? zone.width() / cfg.fine_grid
                                      : cfg.window.width() / cfg.coarse_grid);
      int l = graph.region_of(m + nrm * off);
      int r = graph.region_of(m - nrm * off);
      if (l >= 0 && r >= 0 && l != r) {
        w.left_region = l;
        w.right_region = r;
        break;
      }
    }
  }

  finalize_region_data(graph, cfg);
  return graph;
}

// --- loop builders -----------------------------------------------------------

namespace {

struct CircleCrossing {
  double angle;
  int wall_id;
  Direction dir;
  BasePoint where;
};

std::vector<CircleCrossing> circle_crossings(const RegionGraph& graph, BasePoint c, double r) {
  std::vector<CircleCrossing> out;
  for (const Wall& w : graph.walls) {
    for (std::size_t k = 0; k + 1 < w.polyline.size(); ++k) {
      Vec2 a = w.polyline[k] - c, b = w.polyline[k + 1] - c;
      double da = a.norm() - r, db = b.norm() - r;
      if (da == 0.0) da = 1e-300;
      if (da * db >= 0) continue;
      // bisect the segment against the circle
      Vec2 lo = a, hi = b;
      for (int it = 0; it < 60; ++it) {
        Vec2 m = (lo + hi) * 0.5;
        if ((lo.norm() - r) * (m.norm() - r) <= 0) hi = m;
        else lo = m;
      }
      Vec2 p = (lo + hi) * 0.5;
      CircleCrossing cc;
      cc.angle = p.angle();
      cc.wall_id = w.id;
      cc.where = c + p;
      // loop runs counter-clockwise; crossing direction relative to the
      // wall's left side
      Vec2 t_wall = (w.polyline[k + 1] - w.polyline[k]).unit();
      Vec2 t_loop = p.perp().unit();
      cc.dir = (t_wall.cross(t_loop) > 0) ? Direction::kForward : Direction::kReverse;
      out.push_back(cc);
    }
  }
  std::sort(out.begin(), out.end(), [](const CircleCrossing& a, const CircleCrossing& b) {
    return a.angle < b.angle;
  });
  return out;
}

}  // namespace

Loop circle_loop(const RegionGraph& graph, BasePoint c, double r) {
  std::vector<CircleCrossing> cc = circle_crossings(graph, c, r);
  Loop loop;
  if (cc.empty()) {
    loop.base_region = graph.region_of(c + Vec2{r, 0});
    return loop;
  }
  // start in the middle of the widest angular gap
  double best_gap = -1.0;
  std::size_t best_k = 0;
  for (std::size_t k = 0; k < cc.size(); ++k) {
    double next = (k + 1 < cc.size()) ? cc[k + 1].angle : cc[0].angle + 2 * 3.14159265358979323846;
    double gap = next - cc[k].angle;
    if (gap > best_gap) { best_gap = gap; best_k = k; }
  }
  double start = cc[best_k].angle + 0.5 * best_gap;
  loop.base_region = graph.region_of(c + Vec2{r * std::cos(start), r * std::sin(start)});
  for (std::size_t k = 1; k <= cc.size(); ++k) {
    const CircleCrossing& x = cc[(best_k + k) % cc.size()];
    loop.crossings.push_back({x.wall_id, x.dir, x.where});
  }
  return loop;
}

Loop loop_around(const RegionGraph& graph, BasePoint p, double r) { return circle_loop(graph, p, r); }

}  // namespace umbilic
