#ifndef EFFHSIM_REACTION_COORDINATE_HPP
#define EFFHSIM_REACTION_COORDINATE_HPP

#include <utility>
#include <vector>

#include "effhsim/baths.hpp"
#include "effhsim/operators.hpp"

namespace effhsim {

/// System plus truncated reaction-coordinate modes, with the residual-bath
/// coupling operators (the embedded a^dag + a of each RC, carrying the ohmic
/// residual spectral density).
struct RCExtendedSystem {
  Operator h_rc;
  std::vector<std::pair<Operator, BathSpec>> residual_couplings;
  std::vector<int> factor_dims;   // [system, M, M, ...]
  int truncation_m = 0;
};

/// Truncated ladder operator: the M x M upper-left block of the infinite a,
/// so a^dag a is exactly diag(0..M-1).
Operator ladder_operator(int m_levels);

/// H_RC = H_S + sum_n [ lambda_n S_n (x) (a_n^dag + a_n) + Omega_n a_n^dag a_n ]
/// on dimension d_sys * M^(#baths). Rejects m_levels < 2 and total dimension
/// above 1e4 (dense eigensolves stop being interactive past that).
RCExtendedSystem build_rc_system(const ModelSpec& model, int m_levels);

/// Partial trace over all RC factors of the Gibbs state of H_RC.
DensityMatrix rc_equilibrium(const RCExtendedSystem& rc_sys, double beta);

struct ConvergedEquilibrium {
  DensityMatrix state;
  int achieved_m = 0;
  double last_delta = 0.0;   // |<sz>(M) - <sz>(M-2)| at acceptance
};

/// Escalates the RC truncation from m_start in steps of 2 until the
/// equilibrium expectation of the probe operator changes by less than tol,
/// then returns the state at the accepted M.
ConvergedEquilibrium rc_equilibrium_converged(const ModelSpec& model, double beta,
                                              const Operator& probe_system_op,
                                              double tol = 1e-3, int m_start = 4);

/// Residual of the polaron ladder identity U_P a U_P^dag = a - eps U_P S U_P^dag
/// on the truncated space, restricted to the lowest floor(M/2) Fock levels
/// (truncation corrupts the top of the ladder).
double check_polaron_ladder_identity(double eps, const Operator& s_op, int m_levels);

}  // namespace effhsim

#endif
