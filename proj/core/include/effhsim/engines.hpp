#ifndef EFFHSIM_ENGINES_HPP
#define EFFHSIM_ENGINES_HPP

#include "effhsim/effective.hpp"
#include "effhsim/reaction_coordinate.hpp"
#include "effhsim/redfield.hpp"

namespace effhsim {

/// Redfield engine on the bare impurity Hamiltonian with the Brownian
/// spectral densities (the ultraweak-coupling treatment).
RedfieldGenerator make_uw_generator(double delta, const BathSpec& bath_z,
                                    const BathSpec& bath_x);

struct EffhEngine {
  EffectiveModel model;
  RedfieldGenerator gen;
};

/// Redfield engine on the polaron-dressed impurity with effective spectral
/// densities.
EffhEngine make_effh_generator(double delta, const BathSpec& bath_z, const BathSpec& bath_x,
                               const QuadratureConfig& quad);

struct RcEngine {
  RCExtendedSystem sys;
  RedfieldGenerator gen;
};

/// Redfield engine on the RC-extended Hamiltonian with the ohmic residual
/// spectral densities.
RcEngine make_rc_generator(const ModelSpec& model, int m_levels);

/// |+><+| with + = (|0> + |1>)/sqrt(2).
DensityMatrix plus_state();

/// |+><+| (x) |0><0| (x) ... over the RC factor dimensions.
DensityMatrix rc_initial_state(const RCExtendedSystem& sys);

/// Slowest nonzero decay rate of the generator: min |Re mu| over modes with
/// |Re mu| above the zero-mode floor. Sets the natural horizon of a decay fit.
double slowest_decay_rate(const RedfieldGenerator& gen);

/// System observable lifted to the RC-extended space; tr(rho * lifted) equals
/// the expectation in the reduced state.
Operator embed_rc_probe(const Operator& sys_op, int n_baths, int m_levels);

}  // namespace effhsim

#endif
