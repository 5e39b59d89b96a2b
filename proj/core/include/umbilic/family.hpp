#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "umbilic/errors.hpp"
#include "umbilic/geometry.hpp"

namespace umbilic {

// Bivariate real polynomial of total degree <= 4 with dense coefficient
// storage; coeff(i, j) multiplies y1^i y2^j.  The parametric family member
// is f_x(y) = f(y) - x.y.
class GeneratingFunction {
 public:
  static constexpr int kMaxDegree = 4;

  double coeff(int i, int j) const { return c_[check(i, j)]; }
  void set_coeff(int i, int j, double v) { c_[check(i, j)] = v; }

  double value(FiberPoint y) const;
  Vec2 gradient(FiberPoint y) const;
  Mat2 hessian(FiberPoint y) const;

  double value_at(BasePoint x, FiberPoint y) const { return value(y) - x.dot(y); }
  Vec2 gradient_at(BasePoint x, FiberPoint y) const { return gradient(y) - x; }

  // Total degree of the highest nonzero monomial (0 for the zero polynomial).
  int degree(double tol = 0.0) const;
  // Degree of the gradient system (degree - 1, floored at 0).
  int gradient_degree(double tol = 0.0) const { int d = degree(tol); return d > 0 ? d - 1 : 0; }

  bool operator==(const GeneratingFunction& o) const { return c_ == o.c_; }

  // Nonzero monomials as (i, j, coefficient), lexicographic in (i, j).
  std::vector<std::array<double, 3>> monomials() const;

 private:
  static std::size_t check(int i, int j);
  std::array<double, 25> c_{};  // index i*5+j, only i+j<=4 used
};

// f(y1, y2) = (1/3) y1^3 - 2 y1 y2^2
GeneratingFunction elliptic_umbilic();

// Sparse perturbation polynomial added coefficient-wise to a generating
// function.  Keys are (i, j) exponent pairs.
struct Perturbation {
  std::map<std::pair<int, int>, double> terms;

  double norm() const;
  bool empty() const { return terms.empty(); }

  // Radial quadratic perturbation used by the umbilic preset: adds
  // -eps*(y1^2 + y2^2).  The negative sign makes the extra critical point
  // inside the caustic a local maximum (index 2), so the descending flow
  // has a source there; the caustic itself is identical for either sign.
  static Perturbation radial(double eps);
};

// Coefficient-wise sum.  Rejects terms that would raise the degree above 4.
GeneratingFunction perturb(const GeneratingFunction& f, const Perturbation& p);

// x = grad f(y): the projection of the graph of df to the base.
BasePoint lagrangian_map(const GeneratingFunction& f, FiberPoint y);

enum class PointLabel : int { kS1 = 0, kS2 = 1, kS3 = 2, kNode = 3, kUnlabeled = 4 };

const char* to_string(PointLabel l);
bool is_saddle_label(PointLabel l);
// 0-based saddle slot (kS1 -> 0, ...); throws LabelMismatch otherwise.
int saddle_slot(PointLabel l);
PointLabel saddle_label(int slot);

struct CriticalPoint {
  FiberPoint y;
  int morse_index = -1;
  double value = 0.0;                  // f_x(y)
  std::array<double, 2> hess_eigs{};   // ascending
  PointLabel label = PointLabel::kUnlabeled;

  bool is_saddle() const { return morse_index == 1; }
  bool is_node() const { return morse_index == 2; }
};

struct FiberData {
  BasePoint base;
  std::vector<CriticalPoint> points;
  bool inside_caustic = false;

  const CriticalPoint* find(PointLabel l) const;
  const CriticalPoint* node() const;
  std::vector<const CriticalPoint*> saddles() const;
};

struct SolverConfig {
  double newton_tol = 1e-12;       // gradient-residual target of the root polish
  double degenerate_tol = 1e-8;    // |det Hess| below this refuses classification
  double merge_tol = 1e-7;         // roots closer than this are one root
  double scan_halfwidth = 8.0;     // multi-start box half-width (fallback path)
  int scan_per_axis = 14;          // multi-start grid resolution per axis
};

// All real solutions of grad f(y) = x, classified by Morse index.
// Quadratic gradient systems (our whole standard family) are solved by an
// exact resultant elimination cross-checked against multi-start Newton;
// higher-degree perturbations fall back to multi-start Newton with deflation.
// Throws DegenerateFiber near the caustic and SolverDivergence when the two
// routes disagree or the root count is not 2 or 4.
FiberData critical_points(const GeneratingFunction& f, BasePoint x,
                          const SolverConfig& cfg = {});

// Root positions only (no classification); building block of the above.
std::vector<FiberPoint> solve_gradient_system(const GeneratingFunction& f, BasePoint x,
                                              const SolverConfig& cfg = {});

// --- continuation -----------------------------------------------------------

struct ContinuationConfig {
  double initial_step = 0.05;      // fraction of the path per predictor step
  double min_step = 1e-9;
  double collision_tol = 1e-5;     // minimum pairwise sheet distance
  SolverConfig solver;
};

// Track a set of fibre points along the straight base segment from their
// common base point to x_to.  Points move by Hessian-predictor Newton
// correction; the sheets must stay pairwise separated (SheetCollision
// otherwise).  Labels are carried along unchanged.
std::vector<CriticalPoint> continue_points(const GeneratingFunction& f, BasePoint x_from,
                                           BasePoint x_to, std::vector<CriticalPoint> pts,
                                           const ContinuationConfig& cfg = {});

// Continuation that is allowed to cross a fold: when two tracked points
// collide, the pair is dropped and the survivors keep going.  Returns the
// surviving labelled points at x_to.
std::vector<CriticalPoint> continue_points_across_fold(const GeneratingFunction& f,
                                                       BasePoint x_from, BasePoint x_to,
                                                       std::vector<CriticalPoint> pts,
                                                       const ContinuationConfig& cfg = {});

// Labelled fibre at the reference point: the node is kNode and saddles are
// kS1..kS3 by increasing angle of (y_saddle - y_node).
FiberData label_reference_fiber(const GeneratingFunction& f, BasePoint x_ref,
                                const SolverConfig& cfg = {});

// Re-labels `fiber` to match `reference` by continuation along the straight
// segment between their base points (no fold crossing allowed).
FiberData transport_labels(const GeneratingFunction& f, const FiberData& reference,
                           FiberData fiber, const ContinuationConfig& cfg = {});

}  // namespace umbilic
