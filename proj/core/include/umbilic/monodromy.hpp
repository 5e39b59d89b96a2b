#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "umbilic/strata.hpp"

namespace umbilic {

// Which wall kinds contribute glue when composing a loop.  A twist line
// crossed with twists disabled still contributes the label-continuation
// permutation between the two region bases (that is the uncorrected bundle);
// a fold or bifurcation wall crossed with its glue disabled is MissingGlue.
struct GluePolicy {
  bool fold = true;
  bool bifurcation = true;
  bool twist = true;
};

struct AppliedGlue {
  int wall_id = -1;
  WallKind kind = WallKind::kBifurcation;
  IntMat induced;            // 2x2 on the region bases
  std::optional<IntMat> chain;
};

struct MonodromyResult {
  Loop loop;
  std::vector<AppliedGlue> applied;
  IntMat composed;           // ordered product, last crossing leftmost
  bool is_identity = false;
  std::string basis_record;  // human-readable transport notes
};

// Ordered product of induced homology matrices along the loop, with basis
// transport across folds.
MonodromyResult compose_loop(const RegionGraph& graph, const Loop& loop,
                             const GluePolicy& policy = {});

// --- sheet monodromy (analytic continuation) --------------------------------

struct SheetMonodromy {
  std::vector<int> permutation;  // sheet k at t=0 ends at slot permutation[k]
  IntMat matrix;                 // permutation matrix
  bool is_transposition = false;
};

// Numerically continue the fibre sheets around a closed base loop sampled by
// `loop(t)`, t in [0,1] with loop(0) == loop(1).  SheetCollision if two
// sheets come within merge tolerance on the way.
SheetMonodromy sheet_monodromy(const GeneratingFunction& f,
                               const std::function<BasePoint(double)>& loop, int init_samples = 256,
                               const ContinuationConfig& cfg = {});

// Circle convenience overload.
SheetMonodromy sheet_monodromy_circle(const GeneratingFunction& f, BasePoint center, double radius,
                                      const ContinuationConfig& cfg = {});

// Loop around one cusp crossing only its two fold arcs: composes the two
// fold glue maps (and any bifurcation wall in between).  Matches the cusp
// fold-composition table.
MonodromyResult cusp_monodromy(const RegionGraph& graph, int cusp_id,
                               const GluePolicy& policy = {});

// --- verification report ----------------------------------------------------

struct ReportItem {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Report {
  std::vector<ReportItem> items;
  bool all_pass() const;
  std::string to_text() const;
};

// Runs every identity of the synthetic fixture catalogue: the wall
// intersection cases, the caustic-limit transports, the cusp families and
// the full-diagram six-matrix product.
Report verify_fixture_suite();

// Structural checks of a numerically built graph: wall equations
// E I(U) = I(V), glue determinants, identity loops around codimension-2
// points, and the global loop with and without twists.
Report verify_numeric_graph(const RegionGraph& graph);

}  // namespace umbilic
