#ifndef EFFHSIM_REDFIELD_HPP
#define EFFHSIM_REDFIELD_HPP

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "effhsim/baths.hpp"
#include "effhsim/operators.hpp"
#include "effhsim/quadrature.hpp"

namespace effhsim {

/// One bath attached to the generator: Hermitian coupling operator, spectral
/// density (with its omega->0 slope) and temperature.
struct BathCoupling {
  Operator op;
  SpectralFunction spectral;
  double temperature = 1.0;
};

/// Spectral decomposition of the (non-normal) superoperator, used for the
/// null-space steady state and for exact time evolution.
struct SuperopEig {
  Eigen::VectorXcd values;
  Matrix right;        // columns
  Matrix right_inv;
};

/// Non-secular Redfield generator in the eigenbasis of the system Hamiltonian.
/// The dissipator tensor R^n_{ab,cd}(w) = (S_n)_ab (S_n)_cd Re C_n(w) is
/// assembled at the true Bohr frequencies; the Lamb shift is dropped.
struct RedfieldGenerator {
  Eigen::Index dim = 0;
  RealVector eigvals;
  Matrix eigvecs;                 // site basis -> eigenbasis
  Eigen::VectorXcd hamiltonian_part;  // diagonal coherent superoperator -i w_ab
  Matrix dissipator;              // dim^2 x dim^2, eigenbasis, row-major vec

  /// L rho for a vectorized density matrix (eigenbasis, row-major).
  Eigen::VectorXcd apply(const Eigen::VectorXcd& rho_vec) const;
  /// Full superoperator (coherent + dissipator).
  Matrix full_superop() const;
  /// Cached spectral decomposition of the full superoperator (computed once,
  /// shared across copies; the generator itself is immutable after build).
  const SuperopEig& superop_eig() const;

 private:
  struct EigCache {
    std::mutex mutex;
    std::shared_ptr<const SuperopEig> eig;
  };
  std::shared_ptr<EigCache> eig_cache_ = std::make_shared<EigCache>();
};

RedfieldGenerator build_redfield(const Operator& h, const std::vector<BathCoupling>& couplings);

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;                    // site basis
  std::map<std::string, std::vector<double>> observables;
};

/// Adaptive Dormand-Prince 5(4) integration of d rho/dt = L rho with relative
/// step tolerance 1e-9. Checks trace drift (<= 1e-8), Hermiticity and
/// positivity (warn to -1e-6, error below) of every output state.
Trajectory propagate(const RedfieldGenerator& gen, const DensityMatrix& rho0,
                     const std::vector<double>& times);

/// Exact evolution through the spectral decomposition of the superoperator.
/// Same contract and checks as propagate; used for long-horizon runs where
/// stepping the fast Bohr oscillations is wasteful.
Trajectory propagate_spectral(const RedfieldGenerator& gen, const DensityMatrix& rho0,
                              const std::vector<double>& times);

/// Records Re tr(rho(t) * op) for each trajectory state under the given name.
void record_observable(Trajectory& traj, const std::string& name, const Operator& op);

/// Null-space steady state (zero mode of the superoperator), trace-normalized
/// and Hermitized. Throws if the zero mode is missing or degenerate.
DensityMatrix steady_state(const RedfieldGenerator& gen);

struct RatePair {
  double gamma_eff = 0.0;
  double gamma_uw = 0.0;
};

/// Analytic population relaxation rates of the impurity model.
/// Gamma_eff = 2 pi kappa_x^2 J_x^eff(w0) (2 n_B(w0) + 1) at the dressed gap
/// w0 = 2 kappa_z Delta; Gamma_uw uses the bare gap and the Brownian density.
RatePair analytic_rates(double delta, const BathSpec& bath_z, const BathSpec& bath_x,
                        const QuadratureConfig& quad);

struct DecayFit {
  double gamma = 0.0;
  double r_squared = 0.0;
};

/// Linear least squares of ln|y - eq| over the window where the shifted
/// amplitude lies in [1e-3, 0.5] of its initial value (skips the early
/// non-exponential transient and the noise floor).
DecayFit fit_decay_rate(const std::vector<double>& times, const std::vector<double>& values,
                        double eq_value);
DecayFit fit_decay_rate(const Trajectory& traj, const std::string& observable, double eq_value);

}  // namespace effhsim

#endif
