#ifndef EFFHSIM_BATHS_HPP
#define EFFHSIM_BATHS_HPP

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace effhsim {

/// One bath's parameters, in units of the spin splitting (Delta = 1).
struct BathSpec {
  double lambda = 0.0;       // system-RC coupling energy
  double omega_rc = 8.0;     // RC frequency
  double gamma = 0.05 / M_PI;  // dimensionless width of the residual coupling
  double cutoff = 1000.0;    // high-frequency cutoff of the ohmic residual bath
  double temperature = 1.0;
  std::string coupling_label;  // "z", "x", or a chain bond index

  double epsilon() const { return lambda / omega_rc; }

  void validate() const {
    if (!(omega_rc > 0) || !(gamma > 0) || !(cutoff > 0) || !(temperature > 0) || lambda < 0)
      throw std::invalid_argument("BathSpec: require omega_rc, gamma, cutoff, temperature > 0 "
                                  "and lambda >= 0 (bath '" + coupling_label + "')");
  }
};

/// Which mapping stage a spectral density belongs to.
enum class SpectralStage { Original, RC, Effective };

/// J(omega) = 4 gamma Omega^2 lambda^2 omega / ((omega^2 - Omega^2)^2 + (2 pi gamma Omega omega)^2)
double brownian_spectral(double omega, const BathSpec& spec);

/// Ohmic residual bath after the RC extraction: gamma * omega * exp(-|omega|/cutoff).
double rc_spectral(double omega, const BathSpec& spec);

/// Polaron-dressed stage: (4 lambda^2 / Omega^2) * J_RC(omega).
double eff_spectral(double omega, const BathSpec& spec);

/// Bose-Einstein occupation 1/(exp(omega/T) - 1), stable for omega/T >> 1.
double bose_einstein(double omega, double temperature);

/// A spectral density together with its slope at omega = 0, which fixes the
/// omega -> 0 limit of the correlation function analytically.
struct SpectralFunction {
  std::function<double(double)> j;
  double slope_at_zero = 0.0;
};

SpectralFunction spectral_function(SpectralStage stage, const BathSpec& spec);

/// Real part of the half-Fourier transform of the bath correlation function:
///   pi J(w)(n_B(w)+1) for w > 0, pi J(|w|) n_B(|w|) for w < 0, and the
///   analytic limit pi T J'(0) at w = 0.
double halffourier_real(const SpectralFunction& j, double omega, double temperature);

/// System description handed to the engine builders: a spin impurity or a
/// bath-engineered chain, plus the attached baths.
struct ModelSpec {
  enum class Kind { Impurity, Chain };
  Kind kind = Kind::Impurity;
  double delta = 1.0;                // impurity splitting
  std::vector<double> deltas;        // chain splittings (size n_spins)
  int n_spins = 0;                   // chain only
  std::vector<BathSpec> baths;       // impurity: labels "z","x"; chain: "1".."N"

  void validate() const;
};

}  // namespace effhsim

#endif
