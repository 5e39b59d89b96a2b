#pragma once

#include <vector>

namespace umbilic {

// Dense univariate polynomial, coefficients in ascending degree order.
using Poly = std::vector<double>;

Poly poly_add(const Poly& p, const Poly& q);
Poly poly_sub(const Poly& p, const Poly& q);
Poly poly_mul(const Poly& p, const Poly& q);
Poly poly_scale(const Poly& p, double s);
double poly_eval(const Poly& p, double t);
Poly poly_trim(Poly p, double tol = 0.0);
int poly_degree(const Poly& p);

// All real roots of p, each one Newton-polished, ascending and deduplicated.
// Uses the companion-matrix eigenvalues of the monic normalization; complex
// pairs are discarded by an imaginary-part threshold scaled to the root size.
std::vector<double> real_roots(const Poly& p, double imag_tol = 1e-8);

}  // namespace umbilic
