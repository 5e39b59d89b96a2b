#pragma once

#include <complex>
#include <vector>

#include "umbilic/family.hpp"

namespace umbilic {

// Analytic mirror data of the family: sheet positions over the base, the
// diagonal connection coefficients, Legendre potentials and the holomorphic
// frame weight.

struct Sheet {
  PointLabel label = PointLabel::kUnlabeled;
  FiberPoint y;
};

struct SheetData {
  BasePoint x;
  std::vector<Sheet> sheets;   // label order
  Vec2 w;                      // dual fibre coordinate, caller-supplied
};

// Fibre points over x labelled by continuation from `reference`.
SheetData sheets(const GeneratingFunction& f, BasePoint x, const FiberData& reference,
                 Vec2 w = {0.0, 0.0}, const SolverConfig& cfg = {});

// Per-sheet purely imaginary connection coefficients: the 1-form on sheet k
// is i*(a1 dz1 + a2 dz2) with (a1, a2) = y_k.
struct ConnectionSample {
  BasePoint x;
  std::vector<Sheet> coefficients;  // (a1, a2) stored in the y slot
};

ConnectionSample connection_form(const SheetData& data);

// Legendre potential of one labelled sheet: h(x) = x.y(x) - f(y(x)), so that
// dh/dx = y(x).
double legendre_potential(const GeneratingFunction& f, PointLabel sheet, BasePoint x,
                          const FiberData& reference, const SolverConfig& cfg = {});

// exp[2 pi (h/2 - A/(4 pi) + i (dh_dx . w))].  The radial part is range
// checked (WeightOverflow) before exponentiation.
std::complex<double> frame_weight(double h, double A, Vec2 dh_dx, Vec2 w);

struct MirrorSample {
  BasePoint x;
  PointLabel sheet;
  FiberPoint y;
  double h = 0.0;
  std::complex<double> weight;
};

// Grid dump over a caustic-free patch; throws PatchNotSimplyConnected when
// label continuation across the patch is inconsistent.
std::vector<MirrorSample> mirror_grid(const GeneratingFunction& f, const FiberData& reference,
                                      Window patch, int n_per_axis, Vec2 w = {0.0, 0.0},
                                      const SolverConfig& cfg = {});

}  // namespace umbilic
