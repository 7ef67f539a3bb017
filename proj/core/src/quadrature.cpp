#include "effhsim/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <lapacke.h>

namespace effhsim {

namespace {

// Golub-Welsch: nodes are eigenvalues of the symmetric tridiagonal Jacobi
// matrix, weights are mu0 * (first eigenvector component)^2.
QuadratureRule golub_welsch(std::vector<double> diag, std::vector<double> offdiag, double mu0) {
  const lapack_int n = static_cast<lapack_int>(diag.size());
  std::vector<double> z(static_cast<size_t>(n) * n, 0.0);
  for (lapack_int i = 0; i < n; ++i) z[static_cast<size_t>(i) * n + i] = 1.0;
  lapack_int info = LAPACKE_dsteqr(LAPACK_COL_MAJOR, 'V', n, diag.data(), offdiag.data(),
                                   z.data(), n);
  if (info != 0)
    throw std::runtime_error("golub_welsch: dsteqr failed, info = " + std::to_string(info));
  QuadratureRule rule;
  rule.nodes = std::move(diag);
  rule.weights.resize(n);
  for (lapack_int j = 0; j < n; ++j) {
    const double v0 = z[static_cast<size_t>(j) * n];
    rule.weights[j] = mu0 * v0 * v0;
  }
  return rule;
}

}  // namespace

QuadratureRule gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: order must be >= 1");
  std::vector<double> d(n, 0.0), e(n > 1 ? n - 1 : 0);
  for (int k = 1; k < n; ++k) e[k - 1] = std::sqrt(k / 2.0);
  return golub_welsch(std::move(d), std::move(e), std::sqrt(M_PI));
}

QuadratureRule gauss_laguerre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_laguerre: order must be >= 1");
  std::vector<double> d(n), e(n > 1 ? n - 1 : 0);
  for (int k = 0; k < n; ++k) d[k] = 2.0 * k + 1.0;
  for (int k = 1; k < n; ++k) e[k - 1] = static_cast<double>(k);
  return golub_welsch(std::move(d), std::move(e), 1.0);
}

int gh_order_for(const QuadratureConfig& quad, double eps_max) {
  if (eps_max <= 1.5) return quad.gh_order;
  const int escalated = 48 + static_cast<int>(std::ceil(5.0 * eps_max * eps_max));
  return std::max(quad.gh_order, escalated);
}

int radial_order_for(const QuadratureConfig& quad, double eps_max) {
  if (eps_max <= 2.0) return quad.radial_order;
  const int escalated = 32 + static_cast<int>(std::ceil(10.0 * eps_max));
  return std::max(quad.radial_order, escalated);
}

}  // namespace effhsim
