#include "effhsim/engines.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace effhsim {

RedfieldGenerator make_uw_generator(double delta, const BathSpec& bath_z,
                                    const BathSpec& bath_x) {
  const Operator h = Operator(delta * pauli('z').mat, true);
  std::vector<BathCoupling> couplings;
  couplings.push_back({pauli('z'), spectral_function(SpectralStage::Original, bath_z),
                       bath_z.temperature});
  couplings.push_back({pauli('x'), spectral_function(SpectralStage::Original, bath_x),
                       bath_x.temperature});
  return build_redfield(h, couplings);
}

EffhEngine make_effh_generator(double delta, const BathSpec& bath_z, const BathSpec& bath_x,
                               const QuadratureConfig& quad) {
  EffhEngine engine;
  engine.model = build_impurity_effective(delta, bath_z, bath_x, quad);
  std::vector<BathCoupling> couplings;
  for (const auto& [op, spec] : engine.model.couplings_eff)
    couplings.push_back({op, spectral_function(SpectralStage::Effective, spec),
                         spec.temperature});
  engine.gen = build_redfield(engine.model.h_s_eff, couplings);
  return engine;
}

RcEngine make_rc_generator(const ModelSpec& model, int m_levels) {
  RcEngine engine;
  engine.sys = build_rc_system(model, m_levels);
  std::vector<BathCoupling> couplings;
  for (const auto& [op, spec] : engine.sys.residual_couplings)
    couplings.push_back({op, spectral_function(SpectralStage::RC, spec), spec.temperature});
  engine.gen = build_redfield(engine.sys.h_rc, couplings);
  return engine;
}

DensityMatrix plus_state() {
  Matrix rho(2, 2);
  rho << 0.5, 0.5, 0.5, 0.5;
  return make_density_matrix(rho);
}

DensityMatrix rc_initial_state(const RCExtendedSystem& sys) {
  std::vector<Operator> factors;
  factors.push_back(Operator(plus_state().op.mat, true));
  for (size_t f = 1; f < sys.factor_dims.size(); ++f) {
    Matrix vac = Matrix::Zero(sys.factor_dims[f], sys.factor_dims[f]);
    vac(0, 0) = 1.0;
    factors.push_back(Operator(std::move(vac), true));
  }
  return make_density_matrix(tensor(factors).mat);
}

Operator embed_rc_probe(const Operator& sys_op, int n_baths, int m_levels) {
  std::vector<Operator> factors{sys_op};
  for (int b = 0; b < n_baths; ++b) factors.push_back(Operator::identity(m_levels));
  return tensor(factors);
}

double slowest_decay_rate(const RedfieldGenerator& gen) {
  const SuperopEig& se = gen.superop_eig();
  const double floor = 1e-10 * std::max(1.0, se.values.cwiseAbs().maxCoeff());
  double slow = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < se.values.size(); ++i) {
    const double r = std::fabs(se.values(i).real());
    if (r > floor) slow = std::min(slow, r);
  }
  if (!std::isfinite(slow))
    throw std::runtime_error("slowest_decay_rate: generator has no decaying mode");
  return slow;
}

}  // namespace effhsim
