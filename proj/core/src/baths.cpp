#include "effhsim/baths.hpp"

#include <cmath>

namespace effhsim {

double brownian_spectral(double omega, const BathSpec& spec) {
  const double om2 = omega * omega;
  const double OM2 = spec.omega_rc * spec.omega_rc;
  const double num = 4.0 * spec.gamma * OM2 * spec.lambda * spec.lambda * omega;
  const double d1 = om2 - OM2;
  const double d2 = 2.0 * M_PI * spec.gamma * spec.omega_rc * omega;
  return num / (d1 * d1 + d2 * d2);
}

double rc_spectral(double omega, const BathSpec& spec) {
  return spec.gamma * omega * std::exp(-std::fabs(omega) / spec.cutoff);
}

double eff_spectral(double omega, const BathSpec& spec) {
  const double eps = spec.lambda / spec.omega_rc;
  return 4.0 * eps * eps * rc_spectral(omega, spec);
}

double bose_einstein(double omega, double temperature) {
  if (!(omega > 0.0)) throw std::invalid_argument("bose_einstein: omega must be > 0");
  if (!(temperature > 0.0)) throw std::invalid_argument("bose_einstein: temperature must be > 0");
  return 1.0 / std::expm1(omega / temperature);
}

SpectralFunction spectral_function(SpectralStage stage, const BathSpec& spec) {
  spec.validate();
  SpectralFunction f;
  switch (stage) {
    case SpectralStage::Original:
      f.j = [spec](double w) { return brownian_spectral(w, spec); };
      f.slope_at_zero = 4.0 * spec.gamma * spec.lambda * spec.lambda /
                        (spec.omega_rc * spec.omega_rc);
      break;
    case SpectralStage::RC:
      f.j = [spec](double w) { return rc_spectral(w, spec); };
      f.slope_at_zero = spec.gamma;
      break;
    case SpectralStage::Effective: {
      f.j = [spec](double w) { return eff_spectral(w, spec); };
      const double eps = spec.lambda / spec.omega_rc;
      f.slope_at_zero = 4.0 * eps * eps * spec.gamma;
      break;
    }
  }
  return f;
}

double halffourier_real(const SpectralFunction& j, double omega, double temperature) {
  if (std::fabs(omega) < 1e-12) return M_PI * temperature * j.slope_at_zero;
  if (omega > 0.0) return M_PI * j.j(omega) * (bose_einstein(omega, temperature) + 1.0);
  return M_PI * j.j(-omega) * bose_einstein(-omega, temperature);
}

void ModelSpec::validate() const {
  if (kind == Kind::Impurity) {
    if (baths.size() < 1)
      throw std::invalid_argument("ModelSpec: impurity model needs at least one bath");
  } else {
    if (n_spins < 2 || n_spins % 2 != 0)
      throw std::invalid_argument("ModelSpec: chain needs an even number of spins >= 2");
    if (!deltas.empty() && static_cast<int>(deltas.size()) != n_spins)
      throw std::invalid_argument("ModelSpec: deltas length must equal n_spins");
  }
  for (const auto& b : baths) b.validate();
}

}  // namespace effhsim
