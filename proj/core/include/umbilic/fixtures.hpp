#pragma once

#include <string>
#include <vector>

#include "umbilic/monodromy.hpp"

namespace umbilic {
namespace fixtures {

// Hand-encoded local wall configurations with their expected crossing
// matrices.  The verification suite runs on these without any numerics; the
// numerical pipeline must reproduce them for whichever configurations the
// chosen perturbation realizes.

// A wall-intersection fixture: the incidence matrices of the regions around
// the intersection point and the expected 3x3 crossing matrices of one
// positively oriented loop.
struct IntersectionCase {
  std::string name;
  std::vector<IncidenceMatrix> region_incidence;  // cyclic, loop order
  std::vector<IntMat> crossing;                   // loop order, one per wall
};

// case (a): both walls carry the same separatrix, crossings alternate with
// their inverses.  case (b): four walls, two separatrix pairs.  case (c):
// five walls including the equal-incidence wall whose tau is fixed by the
// identity constraint.
IntersectionCase intersection_case_a();
IntersectionCase intersection_case_b();
IntersectionCase intersection_case_c();

// A caustic-limit fixture: a bifurcation wall meeting the caustic at a
// non-cusp fold point.  Stores the loop data (inside wall matrix, dying
// labels of the folds crossed, outside 2x2 matrix when the wall continues
// outside) plus the expected intermediate chain representatives of a
// transported generic class.
struct CausticLimitCase {
  std::string name;
  IncidenceMatrix inside_start;          // incidence in the starting region
  IntMat wall_inside;                    // 3x3 at the inside crossing
  PointLabel fold_dying;                 // fold arc at the limit point
  bool wall_continues_outside = false;
  IntMat wall_outside;                   // 2x2 (continuing case only)
  // intermediate representatives of the transported class as 3x3 / 2x3
  // integer matrices applied to the symbol column (h1, h2, h3)
  std::vector<IntMat> expected_stages;
};

CausticLimitCase caustic_limit_case_a();
CausticLimitCase caustic_limit_case_b();

// A cusp family: merging pair, case, expected fold composition.
struct CuspFixture {
  std::string name;
  PointLabel enter_dying, exit_dying;
  CuspCase c;
  IntMat expected;
};

std::vector<CuspFixture> cusp_catalogue();

// The full-diagram fixture: a synthetic region graph of a perturbed-umbilic
// base plane (tricuspoid caustic, three bifurcation lines, three twist
// lines) whose outer loop crosses six walls; the expected six 2x2 matrices
// multiply to the identity.
struct GlobalLoopFixture {
  RegionGraph graph;
  Loop outer_loop;
  std::vector<IntMat> expected;  // loop order
};

GlobalLoopFixture global_loop_fixture();

// All fixture names, for the --list flag.
std::vector<std::string> catalogue_names();

}  // namespace fixtures
}  // namespace umbilic
