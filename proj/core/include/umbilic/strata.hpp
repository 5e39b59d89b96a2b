#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "umbilic/homology.hpp"

namespace umbilic {

enum class WallKind { kFold, kCusp, kBifurcation, kTwistLine };

const char* to_string(WallKind k);

// One wall of the base-plane stratification.  Folds carry the dying saddle;
// bifurcation walls carry the ordered separatrix pair (i, j) (1-based saddle
// slots: i is the saddle whose incidence entry the crossing may change, j
// the other end of the new separatrix) and the resolved tau; twist lines
// carry their cusp id.
struct Wall {
  int id = -1;
  WallKind kind = WallKind::kBifurcation;
  Polyline polyline;
  // fold
  PointLabel dying = PointLabel::kUnlabeled;
  // bifurcation
  int pair_i = 0, pair_j = 0;
  int tau = 0;
  bool tau_defaulted = false;
  // twist line
  int cusp_id = -1;
  // adjacency: regions on the left/right of the polyline direction
  int left_region = -1, right_region = -1;
};

struct Cusp {
  int id = -1;
  BasePoint pos;
  Vec2 axis;                                 // unit, points away from the interior
  std::array<PointLabel, 2> merging{PointLabel::kUnlabeled, PointLabel::kUnlabeled};
  CuspCase c = CuspCase::kA;
  // fold wall ids meeting at this cusp, aligned with `merging`
  std::array<int, 2> arcs{-1, -1};
};

struct Region {
  int id = -1;
  BasePoint rep;                             // max-clearance representative
  bool inside = false;
  std::optional<IncidenceMatrix> incidence;  // inside regions only
  std::vector<PointLabel> labels;            // saddle labels present (label order)
  double clearance = 0.0;
};

struct CausticData {
  bool degenerate = false;   // unperturbed case: the caustic is one point
  BasePoint point;           // degenerate case only
  Polyline curve;            // closed polyline (base plane)
  Polyline preimage;         // matching discriminant curve (fibre plane)
  std::vector<Cusp> cusps;
};

struct CausticConfig {
  double step = 0.02;        // arclength step as a fraction of the curve scale
  double newton_tol = 1e-12;
  double closure_tol = 1e-6;
  double cusp_tol = 1e-10;
  int max_points = 20000;
};

// Predictor-corrector continuation of {det Hess f = 0} in the fibre plane,
// pushed through the Lagrangian map; cusps are flagged where the image
// tangent vanishes.  OpenCurve if the trace fails to close.
CausticData trace_caustic(const GeneratingFunction& f, const CausticConfig& cfg = {});

// Crossing of an ordered wall sequence; base_region is where the loop
// starts, each step names the wall crossed and the side change.
struct LoopCrossing {
  int wall_id = -1;
  Direction direction = Direction::kForward;  // kForward: right -> left
  BasePoint where;                            // crossing location (numeric graphs)
};

struct Loop {
  int base_region = -1;
  std::vector<LoopCrossing> crossings;
};

struct RegionGraph {
  GeneratingFunction f;
  Window window;
  CausticData caustic;
  std::vector<Wall> walls;       // folds, bifurcations, twist lines
  std::vector<Region> regions;
  // classified scan samples, kept for point location
  std::vector<std::pair<BasePoint, int>> sample_index;

  const Wall* wall(int id) const;
  const Region* region(int id) const;
  int region_of(BasePoint x) const;  // region of the nearest classified sample
};

struct StrataConfig {
  Window window{};
  int coarse_grid = 48;            // samples per axis over the window
  int fine_grid = 56;              // samples per axis over the caustic zone
  double fine_zone_factor = 5.0;   // caustic bounding-box inflation
  double bisect_tol = 1e-6;
  double wall_gap = 2.5;           // chain gap, in units of the local grid step
  double guard_band = 1e-4;        // clearance for representative points
  unsigned seed = 20240817;        // deterministic sampling
  SolverConfig solver{};
  FlowConfig flow{};
  CausticConfig caustic{};
};

// Full stratification: caustic, bifurcation walls (found by the two merged
// detectors), twist lines, regions with incidence data, adjacency, tau
// resolution.  Raises ArrangementFailure on structure outside the catalogued
// local configurations and UnresolvedWall when the detectors disagree.
RegionGraph build_region_graph(const GeneratingFunction& f, const StrataConfig& cfg = {});

// Standalone wall detection (used by build_region_graph, exposed for the
// walls subcommand and tests): returns bifurcation wall polylines only.
std::vector<Polyline> locate_bifurcation_walls(const GeneratingFunction& f,
                                               const StrataConfig& cfg = {});

// Installs the three twist half-lines (outward cusp-axis rays clipped to the
// window) into the graph; PlacementConflict if a ray cannot clear the other
// walls even after the smallest rotation.
void install_twist_lines(RegionGraph& graph, const StrataConfig& cfg = {});

// Loop through the ordered wall crossings hit by the circle of radius r
// centred at c, starting from the region containing the angle-0 point.
Loop circle_loop(const RegionGraph& graph, BasePoint c, double r);

// Small positively-oriented loop around a point (cusp, wall intersection or
// fold-limit point), radius r.
Loop loop_around(const RegionGraph& graph, BasePoint p, double r);

}  // namespace umbilic
