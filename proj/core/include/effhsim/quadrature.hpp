#ifndef EFFHSIM_QUADRATURE_HPP
#define EFFHSIM_QUADRATURE_HPP

#include <stdexcept>
#include <vector>

namespace effhsim {

/// Node counts for the momentum-space integrals. gh_order is per momentum
/// variable of the Gauss-Hermite tensor rule; theta_points and radial_order
/// control the polar form of the kappa integrals.
struct QuadratureConfig {
  int gh_order = 40;
  int theta_points = 64;
  int radial_order = 64;

  void validate() const {
    if (gh_order < 2 || theta_points < 2 || radial_order < 2)
      throw std::invalid_argument("QuadratureConfig: all node counts must be >= 2");
  }
};

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule: integrates f(x) e^{-x^2} dx over the real line.
/// Stable for large n (Golub-Welsch on the Jacobi matrix).
QuadratureRule gauss_hermite(int n);

/// Gauss-Laguerre rule: integrates f(u) e^{-u} du over [0, inf).
QuadratureRule gauss_laguerre(int n);

/// Escalated Gauss-Hermite order for integrands oscillating like
/// exp(i 2*sqrt(2) eps p): the configured order, raised when eps > 1.5.
int gh_order_for(const QuadratureConfig& quad, double eps_max);

/// Escalated radial Gauss-Laguerre order for the polar kappa integrals.
int radial_order_for(const QuadratureConfig& quad, double eps_max);

}  // namespace effhsim

#endif
