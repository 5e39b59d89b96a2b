#pragma once

#include <stdexcept>
#include <string>

namespace umbilic {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define UMBILIC_ERROR(Name)                                      \
  struct Name : Error {                                          \
    explicit Name(const std::string& what) : Error(what) {}      \
  }

// family
UMBILIC_ERROR(DegenerateFiber);
UMBILIC_ERROR(SolverDivergence);
// flow
UMBILIC_ERROR(IntegrationFailure);
UMBILIC_ERROR(NotInsideCaustic);
UMBILIC_ERROR(NearWall);
UMBILIC_ERROR(DegenerateLeadingForm);
// strata
UMBILIC_ERROR(OpenCurve);
UMBILIC_ERROR(UnresolvedWall);
UMBILIC_ERROR(ArrangementFailure);
UMBILIC_ERROR(PlacementConflict);
// homology
UMBILIC_ERROR(LabelMismatch);
UMBILIC_ERROR(IncompatibleIncidence);
UMBILIC_ERROR(WrongIncidence);
UMBILIC_ERROR(UnknownCase);
// monodromy
UMBILIC_ERROR(MissingGlue);
UMBILIC_ERROR(SheetCollision);
// mirror
UMBILIC_ERROR(PatchNotSimplyConnected);
UMBILIC_ERROR(WeightOverflow);
// cli / config
UMBILIC_ERROR(ConfigError);

#undef UMBILIC_ERROR

}  // namespace umbilic
