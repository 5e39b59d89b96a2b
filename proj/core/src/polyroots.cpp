#include "umbilic/polyroots.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace umbilic {

Poly poly_add(const Poly& p, const Poly& q) {
  Poly r(std::max(p.size(), q.size()), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) r[i] += p[i];
  for (std::size_t i = 0; i < q.size(); ++i) r[i] += q[i];
  return r;
}

Poly poly_sub(const Poly& p, const Poly& q) {
  Poly r(std::max(p.size(), q.size()), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) r[i] += p[i];
  for (std::size_t i = 0; i < q.size(); ++i) r[i] -= q[i];
  return r;
}

Poly poly_mul(const Poly& p, const Poly& q) {
  if (p.empty() || q.empty()) return {};
  Poly r(p.size() + q.size() - 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
  return r;
}

Poly poly_scale(const Poly& p, double s) {
  Poly r = p;
  for (double& c : r) c *= s;
  return r;
}

double poly_eval(const Poly& p, double t) {
  double v = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) v = v * t + p[i];
  return v;
}

Poly poly_trim(Poly p, double tol) {
  while (!p.empty() && std::abs(p.back()) <= tol) p.pop_back();
  return p;
}

int poly_degree(const Poly& p) {
  for (std::size_t i = p.size(); i-- > 0;)
    if (p[i] != 0.0) return static_cast<int>(i);
  return -1;
}

namespace {

double poly_eval_deriv(const Poly& p, double t) {
  double v = 0.0;
  for (std::size_t i = p.size(); i-- > 1;) v = v * t + static_cast<double>(i) * p[i];
  return v;
}

}  // namespace

std::vector<double> real_roots(const Poly& p_in, double imag_tol) {
  // drop numerically negligible leading coefficients relative to the largest
  double maxc = 0.0;
  for (double c : p_in) maxc = std::max(maxc, std::abs(c));
  if (maxc == 0.0) return {};
  Poly p = poly_trim(p_in, 1e-13 * maxc);
  int deg = poly_degree(p);
  if (deg <= 0) return {};
  if (deg == 1) return {-p[0] / p[1]};

  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -p[static_cast<std::size_t>(i)] / p[static_cast<std::size_t>(deg)];

  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, /*computeEigenvectors=*/false);
  std::vector<double> roots;
  for (int k = 0; k < deg; ++k) {
    std::complex<double> z = es.eigenvalues()(k);
    double scale = 1.0 + std::abs(z);
    if (std::abs(z.imag()) > imag_tol * scale) continue;
    double r = z.real();
    // Newton polish
    for (int it = 0; it < 40; ++it) {
      double f = poly_eval(p, r), df = poly_eval_deriv(p, r);
      if (df == 0.0) break;
      double step = f / df;
      r -= step;
      if (std::abs(step) < 1e-15 * (1.0 + std::abs(r))) break;
    }
    roots.push_back(r);
  }
  std::sort(roots.begin(), roots.end());
  // dedupe near-coincident polished roots
  std::vector<double> out;
  for (double r : roots) {
    if (out.empty() || std::abs(r - out.back()) > 1e-9 * (1.0 + std::abs(r))) out.push_back(r);
  }
  return out;
}

}  // namespace umbilic
