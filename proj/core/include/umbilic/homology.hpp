#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "umbilic/flow.hpp"
#include "umbilic/intmat.hpp"

namespace umbilic {

// Two-term Morse complex of one fibre.  Inside the caustic the generators
// are the three saddles plus the node and the differential is the incidence
// column; outside there are two saddle generators and a zero differential.
struct MorseComplex {
  bool inside = false;
  std::vector<PointLabel> saddle_gens;     // label order
  std::optional<PointLabel> node_gen;
  IncidenceMatrix differential;            // inside only

  int rank1() const { return static_cast<int>(saddle_gens.size()); }
};

MorseComplex morse_complex(const GeneratingFunction& f, const FiberData& fiber,
                           const FlowConfig& cfg = {});

// Degree-1 Morse homology of a two-term complex: rank-2 quotient of the
// saddle chain module.  The basis is deterministic: inside, the images of
// the two standard generators other than the pivot (first label with
// incidence 1); outside, the two saddle generators in label order.
struct HomologyFibre {
  int ambient = 2;                          // 2 outside, 3 inside
  std::vector<PointLabel> gens;             // ambient labels in order
  std::optional<IncidenceMatrix> relation;  // inside only
  int pivot = -1;                           // ambient index killed by the relation
  std::array<int, 2> basis{};               // ambient indices of the basis classes

  // Coordinates of a chain's homology class in the chosen basis.
  std::array<std::int64_t, 2> coords(const std::array<std::int64_t, 3>& chain) const;
};

HomologyFibre homology_fibre(const MorseComplex& c);

enum class Direction { kForward, kReverse };

// Chain-level integer matrix between Morse complexes across a wall together
// with the induced map on the chosen rank-2 homology bases.
struct GlueMap {
  IntMat chain;     // 3x3, 2x3, 3x2 or 2x2
  IntMat induced;   // 2x2, det +-1
  int wall_id = -1;
  Direction direction = Direction::kForward;
};

// Induced 2x2 matrix of an arbitrary chain map between fibres; checks that
// the map sends the source relation into the target relation lattice.
IntMat induced_on_homology(const IntMat& chain, const HomologyFibre& src,
                           const HomologyFibre& dst);

// Fold glue: inclusion of the two surviving saddle generators when crossing
// out of the caustic kills the (node, dying) pair.  direction kForward maps
// outside -> inside; kReverse is the inverse read-off.
GlueMap caustic_glue(const HomologyFibre& outside, const HomologyFibre& inside,
                     PointLabel dying, Direction direction);

// Elementary wall matrix E_ij(tau) with E I(U) = I(V); (i, j) is 1-based in
// saddle slots.  When the incidences agree the equation does not pin tau and
// `tau_policy` (resolved by the composition constraints around the adjacent
// codimension-2 points) decides; without a policy tau = 0 is used and
// `tau_defaulted` is set on the result.
struct WallMatrixResult {
  IntMat chain;   // 3x3
  int tau = 0;
  bool tau_defaulted = false;
};

WallMatrixResult wall_matrix(const IncidenceMatrix& I_U, const IncidenceMatrix& I_V, int i,
                             int j, std::optional<int> tau_policy = std::nullopt);

// Outside restriction of a 3x3 wall matrix: delete the row and column of the
// label that dies where the wall enters the caustic.  j_dying is a 1-based
// slot and must not touch the wall's own (i, j) pair.
IntMat wall_matrix_outside(const IntMat& chain3, int i, int j, int j_dying);

enum class CuspCase { kA, kB };

// The two fold arcs meeting at a cusp where the node merges with saddles
// (a, b): a loop entering through the arc that kills `a` and leaving through
// the one that kills `b` composes, in label-ordered bases, to one of eight
// integer matrices depending on the cusp pair and on whether the nearby
// inside region feeds gradient lines to all three saddles (case A) or only
// to the two merging ones (case B).
IntMat cusp_fold_composition(PointLabel enter_dying, PointLabel exit_dying, CuspCase c);

// Glue map installed along the half-line at a cusp: the inverse of the fold
// composition, so that the loop around the cusp becomes the identity.
IntMat cusp_twist(PointLabel enter_dying, PointLabel exit_dying, CuspCase c);

// Chain-level splitting used at a case-A cusp where the node merges with s2
// and s3 (incidence all ones): h -> (h1 - h2 - h3, -h2, -h3).  Commutes with
// the cycle equivalence and induces the cusp-cancelling homology map.
IntMat split_twist_chain_glue(const IncidenceMatrix& I);

}  // namespace umbilic
