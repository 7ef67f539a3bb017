#ifndef EFFHSIM_EFFECTIVE_HPP
#define EFFHSIM_EFFECTIVE_HPP

#include <utility>
#include <vector>

#include "effhsim/baths.hpp"
#include "effhsim/operators.hpp"
#include "effhsim/quadrature.hpp"

namespace effhsim {

/// One bath's entry in the non-factorized polaron exponent: the ratio
/// epsilon = lambda/Omega and the Hermitian system coupling operator.
struct CouplingTerm {
  double epsilon = 0.0;
  Operator s_op;
};

/// Output of the polaron dressing: the effective system Hamiltonian and the
/// dressed coupling operators, each paired with its (effective-stage) bath.
struct EffectiveModel {
  Operator h_s_eff;
  std::vector<std::pair<Operator, BathSpec>> couplings_eff;
  SpectralStage stage = SpectralStage::Effective;
};

/// kappa(eps) = 1 - sqrt(2) eps F(sqrt(2) eps): the dressing function when the
/// two baths have identical spectral functions. In (0, 1], minimum ~0.36 near
/// eps ~ 1.06, approaches 1/2 from below at strong coupling.
double kappa_equal(double eps);

struct KappaPair {
  double kappa_z = 1.0;
  double kappa_x = 1.0;
};

/// Dressing functions for unequal couplings, from the polar double integral;
/// kappa_x(ez, ex) = kappa_z(ex, ez) by the swap symmetry. Returns (1, 1) when
/// both ratios vanish (continuity; the integrand is 0/0 there).
KappaPair kappa_pair(double eps_z, double eps_x, const QuadratureConfig& quad);

/// Generic effective operator <0| U_P O U_P^dag |0> evaluated as a
/// tensor-product Gauss-Hermite quadrature over the RC momentum variables,
/// with U_P(p) = exp(-i sqrt(2) sum_n p_n eps_n S_n).
Operator effective_operator(const Operator& o_s,
                            const std::vector<CouplingTerm>& couplings,
                            const QuadratureConfig& quad);

/// Impurity spin coupled to a decohering (sigma_z) and a dissipative (sigma_x)
/// bath: H_eff = kappa_z Delta sigma_z, S_z_eff = kappa_z sigma_z,
/// S_x_eff = kappa_x sigma_x. The scalar (S_n^2)^eff part is dropped.
EffectiveModel build_impurity_effective(double delta, const BathSpec& bath_z,
                                        const BathSpec& bath_x,
                                        const QuadratureConfig& quad);

/// Bond interaction strength of the bath-engineered chain: the 3-variable
/// Gaussian integral, evaluated by conditioning on the shared momentum (the
/// two inner integrals factorize given p2). xi(0) = 2; xi -> ~0.61 at large eps.
double xi(double eps, const QuadratureConfig& quad);

struct ChainDressingN2 {
  double kappa1 = 2.0;
  double kappa2 = 0.0;
  double kappa3 = 0.0;
};

/// Closed forms (in Dawson functions) of the two-spin-chain dressing of
/// (S_1^2)^eff = kappa1 xx + kappa2 yy + kappa3 zz.
ChainDressingN2 chain_dressing_n2(double eps);

/// Bath-engineered Kitaev-XY chain, even n_spins, periodic boundary:
///   H_eff = sum_n (2 kappa - 1) Delta_n sz_n
///           - (4 lambda^2/Omega) [ sum_odd xi xx + sum_even xi yy ]
/// with dressed couplings S_n_eff = kappa (s^a_n + s^a_{n+1}), a alternating
/// x (odd bonds) / y (even bonds). For n_spins = 2 the periodic wrap makes the
/// two bonds share both baths and the N=2 closed forms apply instead.
EffectiveModel build_chain_effective(int n_spins, const std::vector<double>& deltas,
                                     double lam, double omega, const QuadratureConfig& quad,
                                     const BathSpec& bath_template = BathSpec{});

enum class PolaronOrder { OneThenTwo, TwoThenOne };

/// The order-dependent effective system Hamiltonian produced by sequential
/// factorized polaron transforms (the nonuniqueness the non-factorized
/// transform removes). Evaluated from the double operator series, truncated
/// once terms fall below machine precision.
Operator factorized_polaron_demo(PolaronOrder order, const Operator& s1, const Operator& s2,
                                 double eps1, double eps2, const Operator& h_s);

}  // namespace effhsim

#endif
