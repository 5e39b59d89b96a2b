#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "umbilic/family.hpp"

namespace umbilic {

// Descending gradient flow dy/dt = -grad f_x(y): the index-2 point is a
// source, saddles keep one stable and one unstable direction, and "gradient
// lines from the node to a saddle" are flow lines leaving the node and
// entering the saddle along its stable branches.

struct FlowConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double max_time = 1e5;
  int max_steps = 400000;
  double escape_radius = 10.0;
  double classify_radius_factor = 4.0;  // escape direction read at this multiple
  double converge_dist = 1e-6;
  double seed_delta = 1e-5;             // scaled by the local eigenvalue scale
  bool record_samples = true;
};

enum class TerminalKind { kConverged, kEscaped, kUndecided };

struct Terminal {
  TerminalKind kind = TerminalKind::kUndecided;
  PointLabel point = PointLabel::kUnlabeled;  // kConverged, when the fibre is labelled
  int point_index = -1;                       // kConverged: index into the fibre
  int sector = -1;                            // kEscaped
};

std::string to_string(const Terminal& t);

struct Trajectory {
  std::vector<double> times;
  Polyline samples;
  Terminal terminal;
};

// Angular sector of the circle at the escape radius on which the leading
// cubic form keeps one sign; escaping trajectories settle onto the
// attracting direction inside one sector.
struct Sector {
  int id = -1;
  double lo = 0.0;          // arc bounds, radians, lo < hi
  double hi = 0.0;
  double attractor = 0.0;   // attracting escape direction inside the arc
  bool descent = false;     // forward (descending) escapes land here
};

struct SectorDecomposition {
  std::vector<Sector> sectors;

  // Sector whose attractor of the requested kind is nearest in angle.
  const Sector* classify(double angle, bool descending) const;
  int count(bool descending) const;
};

// Sign arcs of the leading cubic form on the circle.  Throws
// DegenerateLeadingForm when the cubic part vanishes identically.
SectorDecomposition asymptotic_sectors(const GeneratingFunction& f);

// Adaptive embedded Runge-Kutta integration of the descending flow until the
// trajectory converges to a critical point of the fibre, escapes, or times
// out (Undecided).  NaN or overflow raises IntegrationFailure.
Trajectory integrate_descending(const GeneratingFunction& f, BasePoint x, FiberPoint y0,
                                const FlowConfig& cfg = {});

// Time-reversed flow; traces stable branches backward.
Trajectory integrate_ascending(const GeneratingFunction& f, BasePoint x, FiberPoint y0,
                               const FlowConfig& cfg = {});

// The four separatrix branches of a saddle: stable branches traced in
// reversed time, unstable branches forward, each seeded a small offset along
// the Hessian eigenvectors.
struct SeparatrixSet {
  std::array<Trajectory, 2> stable;
  std::array<Trajectory, 2> unstable;
};

SeparatrixSet saddle_separatrices(const GeneratingFunction& f, BasePoint x,
                                  const CriticalPoint& saddle, const FlowConfig& cfg = {});
SeparatrixSet saddle_separatrices(const GeneratingFunction& f, const FiberData& fiber,
                                  const CriticalPoint& saddle, const FlowConfig& cfg = {});

// 0/1 column indexed by saddle slot: entry i records whether some backward
// stable branch of saddle s_(i+1) reaches the node.
struct IncidenceMatrix {
  std::array<int, 3> entries{0, 0, 0};

  int& operator[](int i) { return entries[static_cast<std::size_t>(i)]; }
  int operator[](int i) const { return entries[static_cast<std::size_t>(i)]; }
  bool operator==(const IncidenceMatrix& o) const { return entries == o.entries; }
  bool operator!=(const IncidenceMatrix& o) const { return !(*this == o); }
  std::string to_string() const;
};

// Requires a labelled four-point fibre (NotInsideCaustic otherwise); NearWall
// when any branch classification is tolerance-ambiguous.
IncidenceMatrix incidence_matrix(const GeneratingFunction& f, const FiberData& fiber,
                                 const FlowConfig& cfg = {});
IncidenceMatrix incidence_matrix(const GeneratingFunction& f, const FiberData& fiber,
                                 const FlowConfig& cfg, const SectorDecomposition& sectors);

// Discrete portrait of one fibre: per saddle, the terminals of the two
// backward-traced stable branches and the two forward unstable branches.
// The signature is constant on each region; comparing signatures of nearby
// fibres (points matched by proximity) is the wall detector.
struct BranchSignature {
  std::array<Terminal, 2> stable;    // backward-traced
  std::array<Terminal, 2> unstable;  // forward-traced
};

struct FlowSignature {
  bool inside = false;
  std::vector<BranchSignature> saddles;  // aligned with the fibre's saddle order
  bool ambiguous = false;                // some branch undecided

  std::string to_string() const;
};

FlowSignature flow_signature(const GeneratingFunction& f, const FiberData& fiber,
                             const FlowConfig& cfg = {});
FlowSignature flow_signature(const GeneratingFunction& f, const FiberData& fiber,
                             const FlowConfig& cfg, const SectorDecomposition& sectors);

// Signature equality under proximity matching of the two fibres' points.
// Branch pairs are compared as unordered sets (the eigenvector orientation
// is not canonical).  Ambiguous signatures never match.
bool signatures_match(const FlowSignature& sa, const FiberData& fa, const FlowSignature& sb,
                      const FiberData& fb);

}  // namespace umbilic
