#include "umbilic/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "umbilic/detail/bipoly.hpp"

namespace umbilic {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Dormand-Prince 5(4) embedded pair.
struct Dopri5 {
  const detail::GradField& field;

  // One trial step from y with size h; fills y_new and the error estimate.
  void step(Vec2 y, double h, Vec2& y_new, double& err, Vec2 k1) const {
    Vec2 k2 = field(y + h * (0.2 * k1));
    Vec2 k3 = field(y + h * ((3.0 / 40.0) * k1 + (9.0 / 40.0) * k2));
    Vec2 k4 = field(y + h * ((44.0 / 45.0) * k1 - (56.0 / 15.0) * k2 + (32.0 / 9.0) * k3));
    Vec2 k5 = field(y + h * ((19372.0 / 6561.0) * k1 - (25360.0 / 2187.0) * k2 +
                             (64448.0 / 6561.0) * k3 - (212.0 / 729.0) * k4));
    Vec2 k6 = field(y + h * ((9017.0 / 3168.0) * k1 - (355.0 / 33.0) * k2 +
                             (46732.0 / 5247.0) * k3 + (49.0 / 176.0) * k4 -
                             (5103.0 / 18656.0) * k5));
    Vec2 inc5 = (35.0 / 384.0) * k1 + (500.0 / 1113.0) * k3 + (125.0 / 192.0) * k4 -
                (2187.0 / 6784.0) * k5 + (11.0 / 84.0) * k6;
    y_new = y + h * inc5;
    Vec2 k7 = field(y_new);
    Vec2 inc4 = (5179.0 / 57600.0) * k1 + (7571.0 / 16695.0) * k3 + (393.0 / 640.0) * k4 -
                (92097.0 / 339200.0) * k5 + (187.0 / 2100.0) * k6 + (1.0 / 40.0) * k7;
    err = h * (inc5 - inc4).norm();
  }
};

struct IntegrationContext {
  const FiberData* fiber = nullptr;              // convergence targets
  const SectorDecomposition* sectors = nullptr;  // escape classification
};

Terminal make_converged(const FiberData& fiber, int index) {
  Terminal t;
  t.kind = TerminalKind::kConverged;
  t.point_index = index;
  t.point = fiber.points[static_cast<std::size_t>(index)].label;
  return t;
}

Trajectory integrate_flow(const GeneratingFunction& f, BasePoint x, FiberPoint y0, double sign,
                          const FlowConfig& cfg, const IntegrationContext& ctx) {
  detail::GradField field(f, x, sign);
  Dopri5 stepper{field};

  Trajectory traj;
  auto record = [&](double t, Vec2 y) {
    if (!cfg.record_samples && !traj.samples.empty()) {
      traj.samples.back() = y;
      traj.times.back() = t;
      return;
    }
    traj.samples.push_back(y);
    traj.times.push_back(t);
  };

  Vec2 y = y0;
  double t = 0.0;
  record(t, y);

  auto near_point = [&](Vec2 p) -> int {
    if (!ctx.fiber) return -1;
    for (std::size_t k = 0; k < ctx.fiber->points.size(); ++k)
      if ((p - ctx.fiber->points[k].y).norm() <= cfg.converge_dist) return static_cast<int>(k);
    return -1;
  };

  if (int k = near_point(y); k >= 0) {
    traj.terminal = make_converged(*ctx.fiber, k);
    return traj;
  }

  double classify_radius = cfg.escape_radius * cfg.classify_radius_factor;
  bool escaped = false;
  double h = 1e-4;
  Vec2 k1 = field(y);

  for (int step = 0; step < cfg.max_steps && t < cfg.max_time; ++step) {
    Vec2 y_new;
    double err = 0.0;
    stepper.step(y, h, y_new, err, k1);
    if (!y_new.finite()) {
      if (h > 1e-14) { h *= 0.25; continue; }
      throw IntegrationFailure("non-finite state during gradient-flow integration");
    }
    double tol = cfg.abs_tol + cfg.rel_tol * std::max(y.norm(), y_new.norm());
    if (err > tol) {
      h *= std::max(0.2, 0.9 * std::pow(tol / err, 0.2));
      continue;
    }
    t += h;
    y = y_new;
    k1 = field(y);
    record(t, y);
    if (err > 0.0) h = std::min(h * std::min(5.0, 0.9 * std::pow(tol / err, 0.2)), cfg.max_time);
    else h *= 5.0;

    if (int k = near_point(y); k >= 0) {
      traj.terminal = make_converged(*ctx.fiber, k);
      return traj;
    }
    double r = y.norm();
    if (r > classify_radius) { escaped = true; break; }
    if (r > cfg.escape_radius && !ctx.sectors) { escaped = true; break; }
  }

  if (escaped) {
    traj.terminal.kind = TerminalKind::kEscaped;
    if (ctx.sectors) {
      const Sector* s = ctx.sectors->classify(y.angle(), sign < 0);
      traj.terminal.sector = s ? s->id : -1;
    }
    return traj;
  }
  traj.terminal.kind = TerminalKind::kUndecided;
  return traj;
}

}  // namespace

std::string to_string(const Terminal& t) {
  switch (t.kind) {
    case TerminalKind::kConverged: {
      std::string s = "converged(";
      s += (t.point != PointLabel::kUnlabeled) ? to_string(t.point)
                                               : ("#" + std::to_string(t.point_index));
      return s + ")";
    }
    case TerminalKind::kEscaped: return "escaped(sector " + std::to_string(t.sector) + ")";
    default: return "undecided";
  }
}

const Sector* SectorDecomposition::classify(double angle, bool descending) const {
  const Sector* best = nullptr;
  double bd = std::numeric_limits<double>::infinity();
  for (const Sector& s : sectors) {
    if (s.descent != descending) continue;
    double d = std::abs(wrap_angle(angle - s.attractor));
    if (d < bd) { bd = d; best = &s; }
  }
  return best;
}

int SectorDecomposition::count(bool descending) const {
  int n = 0;
  for (const Sector& s : sectors) n += (s.descent == descending);
  return n;
}

SectorDecomposition asymptotic_sectors(const GeneratingFunction& f) {
  // restriction of the cubic part to the unit circle
  auto cubic = [&](double th) {
    double c = std::cos(th), s = std::sin(th);
    return f.coeff(3, 0) * c * c * c + f.coeff(2, 1) * c * c * s + f.coeff(1, 2) * c * s * s +
           f.coeff(0, 3) * s * s * s;
  };

  const int n = 4096;
  double maxabs = 0.0;
  std::vector<double> vals(n);
  for (int k = 0; k < n; ++k) {
    vals[static_cast<std::size_t>(k)] = cubic(-kPi + 2.0 * kPi * k / n);
    maxabs = std::max(maxabs, std::abs(vals[static_cast<std::size_t>(k)]));
  }
  if (maxabs < 1e-14) throw DegenerateLeadingForm("cubic part vanishes identically");

  // zeros of the restriction by bisection on sign changes
  std::vector<double> zeros;
  for (int k = 0; k < n; ++k) {
    double a = -kPi + 2.0 * kPi * k / n, b = -kPi + 2.0 * kPi * (k + 1) / n;
    double fa = vals[static_cast<std::size_t>(k)], fb = cubic(b);
    if (fa == 0.0) { zeros.push_back(a); continue; }
    if (fa * fb >= 0.0) continue;
    for (int it = 0; it < 80; ++it) {
      double m = 0.5 * (a + b), fm = cubic(m);
      if (fa * fm <= 0.0) { b = m; } else { a = m; fa = fm; }
    }
    zeros.push_back(0.5 * (a + b));
  }
  if (zeros.size() < 2) throw DegenerateLeadingForm("cubic form has no sign change on the circle");

  SectorDecomposition d;
  for (std::size_t k = 0; k < zeros.size(); ++k) {
    Sector s;
    s.id = static_cast<int>(k);
    s.lo = zeros[k];
    s.hi = (k + 1 < zeros.size()) ? zeros[k + 1] : zeros[0] + 2.0 * kPi;
    double mid = 0.5 * (s.lo + s.hi);
    s.descent = cubic(mid) < 0.0;
    // attracting escape direction: interior extremum of the restriction
    double a = s.lo, b = s.hi;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    auto val = [&](double th) { return s.descent ? cubic(th) : -cubic(th); };
    double f1 = val(x1), f2 = val(x2);
    for (int it = 0; it < 200; ++it) {
      if (f1 < f2) { b = x2; x2 = x1; f2 = f1; x1 = b - phi * (b - a); f1 = val(x1); }
      else { a = x1; x1 = x2; f1 = f2; x2 = a + phi * (b - a); f2 = val(x2); }
    }
    s.attractor = wrap_angle(0.5 * (a + b));
    d.sectors.push_back(s);
  }
  return d;
}

Trajectory integrate_descending(const GeneratingFunction& f, BasePoint x, FiberPoint y0,
                                const FlowConfig& cfg) {
  FiberData fiber = critical_points(f, x);
  SectorDecomposition sectors = asymptotic_sectors(f);
  IntegrationContext ctx{&fiber, &sectors};
  return integrate_flow(f, x, y0, -1.0, cfg, ctx);
}

Trajectory integrate_ascending(const GeneratingFunction& f, BasePoint x, FiberPoint y0,
                               const FlowConfig& cfg) {
  FiberData fiber = critical_points(f, x);
  SectorDecomposition sectors = asymptotic_sectors(f);
  IntegrationContext ctx{&fiber, &sectors};
  return integrate_flow(f, x, y0, +1.0, cfg, ctx);
}

namespace {

SeparatrixSet separatrices_impl(const GeneratingFunction& f, const FiberData& fiber,
                                const CriticalPoint& saddle, const SectorDecomposition& sectors,
                                const FlowConfig& cfg) {
  if (!saddle.is_saddle()) throw Error("saddle_separatrices: point is not a saddle");
  Mat2 h = f.hessian(saddle.y);
  if (std::abs(h.det()) < 1e-12) throw DegenerateFiber("saddle Hessian nearly degenerate");
  auto eigs = h.sym_eigenvalues();
  Vec2 v_unstable = h.sym_eigenvector(eigs[0]);  // negative eigenvalue direction
  Vec2 v_stable = h.sym_eigenvector(eigs[1]);    // positive eigenvalue direction
  double scale = std::max(1.0, 0.5 * (std::abs(eigs[0]) + std::abs(eigs[1])));
  double delta = cfg.seed_delta * scale;

  IntegrationContext ctx{&fiber, &sectors};
  SeparatrixSet set;
  for (int s = 0; s < 2; ++s) {
    double sgn = (s == 0) ? 1.0 : -1.0;
    set.stable[static_cast<std::size_t>(s)] =
        integrate_flow(f, fiber.base, saddle.y + delta * sgn * v_stable, +1.0, cfg, ctx);
    set.unstable[static_cast<std::size_t>(s)] =
        integrate_flow(f, fiber.base, saddle.y + delta * sgn * v_unstable, -1.0, cfg, ctx);
  }
  return set;
}

}  // namespace

SeparatrixSet saddle_separatrices(const GeneratingFunction& f, const FiberData& fiber,
                                  const CriticalPoint& saddle, const FlowConfig& cfg) {
  SectorDecomposition sectors = asymptotic_sectors(f);
  return separatrices_impl(f, fiber, saddle, sectors, cfg);
}

SeparatrixSet saddle_separatrices(const GeneratingFunction& f, BasePoint x,
                                  const CriticalPoint& saddle, const FlowConfig& cfg) {
  FiberData fiber = critical_points(f, x);
  return saddle_separatrices(f, fiber, saddle, cfg);
}

std::string IncidenceMatrix::to_string() const {
  return "(" + std::to_string(entries[0]) + "," + std::to_string(entries[1]) + "," +
         std::to_string(entries[2]) + ")";
}

IncidenceMatrix incidence_matrix(const GeneratingFunction& f, const FiberData& fiber,
                                 const FlowConfig& cfg) {
  return incidence_matrix(f, fiber, cfg, asymptotic_sectors(f));
}

IncidenceMatrix incidence_matrix(const GeneratingFunction& f, const FiberData& fiber,
                                 const FlowConfig& cfg, const SectorDecomposition& sectors) {
  if (!fiber.inside_caustic || !fiber.node())
    throw NotInsideCaustic("incidence matrix needs a four-point fibre");
  IncidenceMatrix I;
  for (const CriticalPoint* s : fiber.saddles()) {
    if (!is_saddle_label(s->label))
      throw LabelMismatch("incidence matrix needs a labelled fibre");
    SeparatrixSet set = separatrices_impl(f, fiber, *s, sectors, cfg);
    int hit = 0;
    for (const Trajectory& branch : set.stable) {
      switch (branch.terminal.kind) {
        case TerminalKind::kConverged: {
          const CriticalPoint& target =
              fiber.points[static_cast<std::size_t>(branch.terminal.point_index)];
          if (target.is_node()) { hit = 1; break; }
          throw NearWall("stable branch terminates at another saddle");
        }
        case TerminalKind::kEscaped: break;
        default:
          throw NearWall("stable branch classification is tolerance-ambiguous");
      }
    }
    I[saddle_slot(s->label)] = hit;
  }
  return I;
}

FlowSignature flow_signature(const GeneratingFunction& f, const FiberData& fiber,
                             const FlowConfig& cfg) {
  return flow_signature(f, fiber, cfg, asymptotic_sectors(f));
}

FlowSignature flow_signature(const GeneratingFunction& f, const FiberData& fiber,
                             const FlowConfig& cfg, const SectorDecomposition& sectors) {
  FlowSignature sig;
  sig.inside = fiber.inside_caustic;
  FlowConfig fast = cfg;
  fast.record_samples = false;
  for (const auto& p : fiber.points) {
    if (!p.is_saddle()) continue;
    SeparatrixSet set = separatrices_impl(f, fiber, p, sectors, fast);
    BranchSignature bs;
    for (int k = 0; k < 2; ++k) {
      bs.stable[static_cast<std::size_t>(k)] = set.stable[static_cast<std::size_t>(k)].terminal;
      bs.unstable[static_cast<std::size_t>(k)] = set.unstable[static_cast<std::size_t>(k)].terminal;
      if (bs.stable[static_cast<std::size_t>(k)].kind == TerminalKind::kUndecided ||
          bs.unstable[static_cast<std::size_t>(k)].kind == TerminalKind::kUndecided)
        sig.ambiguous = true;
    }
    sig.saddles.push_back(bs);
  }
  return sig;
}

std::string FlowSignature::to_string() const {
  std::string out = inside ? "in" : "out";
  for (const auto& s : saddles) {
    out += " [";
    out += umbilic::to_string(s.stable[0]) + " " + umbilic::to_string(s.stable[1]) + " | ";
    out += umbilic::to_string(s.unstable[0]) + " " + umbilic::to_string(s.unstable[1]);
    out += "]";
  }
  return out;
}

namespace {

// proximity matching of two fibres: match[i] is the index in fb of point i
// of fa, or -1
std::vector<int> match_points(const FiberData& fa, const FiberData& fb) {
  std::vector<int> match(fa.points.size(), -1);
  std::vector<bool> used(fb.points.size(), false);
  for (std::size_t i = 0; i < fa.points.size(); ++i) {
    double bd = std::numeric_limits<double>::infinity();
    int best = -1;
    for (std::size_t j = 0; j < fb.points.size(); ++j) {
      if (used[j]) continue;
      double d = (fa.points[i].y - fb.points[j].y).norm();
      if (d < bd) { bd = d; best = static_cast<int>(j); }
    }
    if (best >= 0) { match[i] = best; used[static_cast<std::size_t>(best)] = true; }
  }
  return match;
}

bool terminal_matches(const Terminal& a, const Terminal& b, const std::vector<int>& pt_match) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case TerminalKind::kConverged:
      return a.point_index >= 0 &&
             pt_match[static_cast<std::size_t>(a.point_index)] == b.point_index;
    case TerminalKind::kEscaped: return a.sector == b.sector;
    default: return false;  // undecided never matches
  }
}

bool branch_pair_matches(const std::array<Terminal, 2>& a, const std::array<Terminal, 2>& b,
                         const std::vector<int>& m) {
  // unordered: the eigenvector orientation is not canonical
  return (terminal_matches(a[0], b[0], m) && terminal_matches(a[1], b[1], m)) ||
         (terminal_matches(a[0], b[1], m) && terminal_matches(a[1], b[0], m));
}

}  // namespace

bool signatures_match(const FlowSignature& sa, const FiberData& fa, const FlowSignature& sb,
                      const FiberData& fb) {
  if (sa.ambiguous || sb.ambiguous) return false;
  if (sa.inside != sb.inside) return false;
  if (fa.points.size() != fb.points.size()) return false;
  if (sa.saddles.size() != sb.saddles.size()) return false;

  std::vector<int> m = match_points(fa, fb);
  for (int v : m)
    if (v < 0) return false;

  // saddle k of fa corresponds to saddle with fb-point index m[idx_a(k)]
  std::vector<int> sad_a, sad_b;
  for (std::size_t i = 0; i < fa.points.size(); ++i)
    if (fa.points[i].is_saddle()) sad_a.push_back(static_cast<int>(i));
  for (std::size_t i = 0; i < fb.points.size(); ++i)
    if (fb.points[i].is_saddle()) sad_b.push_back(static_cast<int>(i));
  if (sad_a.size() != sa.saddles.size() || sad_b.size() != sb.saddles.size()) return false;

  for (std::size_t k = 0; k < sad_a.size(); ++k) {
    int target = m[static_cast<std::size_t>(sad_a[k])];
    auto it = std::find(sad_b.begin(), sad_b.end(), target);
    if (it == sad_b.end()) return false;  // saddle matched to a non-saddle
    std::size_t kb = static_cast<std::size_t>(it - sad_b.begin());
    if (!branch_pair_matches(sa.saddles[k].stable, sb.saddles[kb].stable, m)) return false;
    if (!branch_pair_matches(sa.saddles[k].unstable, sb.saddles[kb].unstable, m)) return false;
  }
  return true;
}

}  // namespace umbilic
