#include "effhsim/redfield.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include <lapacke.h>

#include "effhsim/effective.hpp"

namespace effhsim {

namespace {

// General (non-Hermitian) eigendecomposition via LAPACK zgeev.
SuperopEig decompose_superop(const Matrix& l) {
  const lapack_int n = static_cast<lapack_int>(l.rows());
  Matrix work = l;
  SuperopEig out;
  out.values.resize(n);
  out.right.resize(n, n);
  lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', n,
                                  reinterpret_cast<lapack_complex_double*>(work.data()), n,
                                  reinterpret_cast<lapack_complex_double*>(out.values.data()),
                                  nullptr, 1,
                                  reinterpret_cast<lapack_complex_double*>(out.right.data()), n);
  if (info != 0)
    throw std::runtime_error("decompose_superop: zgeev failed, info = " + std::to_string(info));
  out.right_inv = out.right.partialPivLu().inverse();
  return out;
}

// Hermitize, trace-normalize, validate. Policy relaxed: Redfield is not CP.
DensityMatrix finalize_state(const Matrix& rho_raw) {
  Matrix rho = (rho_raw + rho_raw.adjoint()) / 2.0;
  rho /= rho.trace();
  return make_density_matrix(rho, PositivityPolicy::Relaxed);
}

struct Dopri5 {
  // Dormand-Prince 5(4) tableau
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // embedded 4th-order weights
  static constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                          e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;
};

}  // namespace

Eigen::VectorXcd RedfieldGenerator::apply(const Eigen::VectorXcd& rho_vec) const {
  return hamiltonian_part.cwiseProduct(rho_vec) + dissipator * rho_vec;
}

Matrix RedfieldGenerator::full_superop() const {
  Matrix l = dissipator;
  l.diagonal() += hamiltonian_part;
  return l;
}

const SuperopEig& RedfieldGenerator::superop_eig() const {
  std::lock_guard<std::mutex> lock(eig_cache_->mutex);
  if (!eig_cache_->eig)
    eig_cache_->eig = std::make_shared<const SuperopEig>(decompose_superop(full_superop()));
  return *eig_cache_->eig;
}

RedfieldGenerator build_redfield(const Operator& h, const std::vector<BathCoupling>& couplings) {
  RedfieldGenerator gen;
  const EigResult eig = hermitian_eig(h);
  const Eigen::Index d = h.dim();
  gen.dim = d;
  gen.eigvals = eig.eigenvalues;
  gen.eigvecs = eig.eigenvectors;

  gen.hamiltonian_part.resize(d * d);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b)
      gen.hamiltonian_part(a * d + b) = Complex(0.0, -(eig.eigenvalues(a) - eig.eigenvalues(b)));

  gen.dissipator = Matrix::Zero(d * d, d * d);
  for (const auto& bath : couplings) {
    if (bath.op.dim() != d)
      throw std::invalid_argument("build_redfield: coupling dimension mismatch");
    const double scale = std::max(bath.op.max_abs(), 1e-300);
    if (bath.op.asymmetry() > 1e-10 * scale)
      throw std::invalid_argument("build_redfield: coupling operator is not Hermitian");

    const Matrix s = eig.eigenvectors.adjoint() * bath.op.mat * eig.eigenvectors;
    // c(i, j) = Re C(w_ij), the correlator at the Bohr frequency E_i - E_j
    Eigen::MatrixXd c(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j)
        c(i, j) = halffourier_real(bath.spectral, eig.eigenvalues(i) - eig.eigenvalues(j),
                                   bath.temperature);

    // m1(a, e) = sum_c S_ac S_ce Re C(w_ec)
    Matrix m1(d, d);
    {
      Matrix sc = s;
      for (Eigen::Index cc = 0; cc < d; ++cc)
        for (Eigen::Index e = 0; e < d; ++e) sc(cc, e) = s(cc, e) * c(e, cc);
      m1 = s * sc;
    }

    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b) {
        const Eigen::Index row = a * d + b;
        for (Eigen::Index e = 0; e < d; ++e) {
          gen.dissipator(row, e * d + b) -= m1(a, e);
          gen.dissipator(row, a * d + e) -= std::conj(m1(b, e));
        }
        for (Eigen::Index e = 0; e < d; ++e)
          for (Eigen::Index f = 0; f < d; ++f)
            gen.dissipator(row, e * d + f) +=
                s(f, b) * s(a, e) * c(e, a) + std::conj(s(e, a) * s(b, f) * c(f, b));
      }
  }
  return gen;
}

namespace {

Trajectory assemble_trajectory(const RedfieldGenerator& gen, const std::vector<double>& times,
                               const std::vector<Eigen::VectorXcd>& vecs) {
  const Eigen::Index d = gen.dim;
  Trajectory traj;
  traj.times = times;
  traj.states.reserve(times.size());
  for (size_t k = 0; k < vecs.size(); ++k) {
    Eigen::Map<const Matrix> rho_eig_t(vecs[k].data(), d, d);
    // row-major vec: index a*d+b; Eigen map is column-major, so transpose
    Matrix rho_eig = rho_eig_t.transpose();
    const double tr_err = std::abs(rho_eig.trace() - Complex(1.0, 0.0));
    if (tr_err > 1e-8)
      throw std::runtime_error("propagate: trace drift " + std::to_string(tr_err) + " at t = " +
                               std::to_string(times[k]));
    const double asym = (rho_eig - rho_eig.adjoint()).cwiseAbs().maxCoeff();
    if (asym > 1e-9)
      throw std::runtime_error("propagate: Hermiticity drift " + std::to_string(asym) +
                               " at t = " + std::to_string(times[k]));
    Matrix rho_site = gen.eigvecs * rho_eig * gen.eigvecs.adjoint();
    traj.states.push_back(finalize_state(rho_site));
    if (traj.states.back().positivity_flagged)
      std::cerr << "propagate: state at t = " << times[k] << " has eigenvalue "
                << traj.states.back().min_eigenvalue << " (tolerated, Redfield is not CP)\n";
  }
  return traj;
}

Eigen::VectorXcd initial_vec(const RedfieldGenerator& gen, const DensityMatrix& rho0) {
  if (rho0.dim() != gen.dim)
    throw std::invalid_argument("propagate: initial state dimension mismatch");
  Matrix rho_eig = gen.eigvecs.adjoint() * rho0.op.mat * gen.eigvecs;
  Eigen::VectorXcd v(gen.dim * gen.dim);
  for (Eigen::Index a = 0; a < gen.dim; ++a)
    for (Eigen::Index b = 0; b < gen.dim; ++b) v(a * gen.dim + b) = rho_eig(a, b);
  return v;
}

void check_times(const std::vector<double>& times) {
  if (times.empty()) throw std::invalid_argument("propagate: empty time grid");
  for (size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1]))
      throw std::invalid_argument("propagate: time grid must be strictly increasing");
}

}  // namespace

Trajectory propagate(const RedfieldGenerator& gen, const DensityMatrix& rho0,
                     const std::vector<double>& times) {
  check_times(times);
  constexpr double rtol = 1e-9;
  constexpr double atol = 1e-12;
  constexpr double safety = 0.9;

  Eigen::VectorXcd y = initial_vec(gen, rho0);
  std::vector<Eigen::VectorXcd> out;
  out.reserve(times.size());
  double t = 0.0;   // rho0 is the state at t = 0
  double h = 1e-4;
  Eigen::VectorXcd k1 = gen.apply(y), k2, k3, k4, k5, k6, k7, y5;

  for (double t_out : times) {
    while (t < t_out) {
      const double h_try = std::min(h, t_out - t);
      k2 = gen.apply(y + h_try * (Dopri5::a21 * k1));
      k3 = gen.apply(y + h_try * (Dopri5::a31 * k1 + Dopri5::a32 * k2));
      k4 = gen.apply(y + h_try * (Dopri5::a41 * k1 + Dopri5::a42 * k2 + Dopri5::a43 * k3));
      k5 = gen.apply(y + h_try * (Dopri5::a51 * k1 + Dopri5::a52 * k2 + Dopri5::a53 * k3 +
                                  Dopri5::a54 * k4));
      k6 = gen.apply(y + h_try * (Dopri5::a61 * k1 + Dopri5::a62 * k2 + Dopri5::a63 * k3 +
                                  Dopri5::a64 * k4 + Dopri5::a65 * k5));
      y5 = y + h_try * (Dopri5::b1 * k1 + Dopri5::b3 * k3 + Dopri5::b4 * k4 + Dopri5::b5 * k5 +
                        Dopri5::b6 * k6);
      k7 = gen.apply(y5);
      const Eigen::VectorXcd y4 = y + h_try * (Dopri5::e1 * k1 + Dopri5::e3 * k3 +
                                               Dopri5::e4 * k4 + Dopri5::e5 * k5 +
                                               Dopri5::e6 * k6 + Dopri5::e7 * k7);
      const double sc = atol + rtol * std::max(y.norm(), y5.norm());
      const double err = (y5 - y4).norm() / sc;
      if (err <= 1.0) {
        t += h_try;
        y.swap(y5);
        k1.swap(k7);   // FSAL
      }
      double factor = safety * std::pow(std::max(err, 1e-16), -0.2);
      factor = std::clamp(factor, 0.2, 5.0);
      h = h_try * factor;
      if (h < 1e-14 * std::max(1.0, std::fabs(t)))
        throw std::runtime_error("propagate: step size underflow (stiffness) at t = " +
                                 std::to_string(t));
    }
    out.push_back(y);
  }
  return assemble_trajectory(gen, times, out);
}

Trajectory propagate_spectral(const RedfieldGenerator& gen, const DensityMatrix& rho0,
                              const std::vector<double>& times) {
  check_times(times);
  const SuperopEig& se = gen.superop_eig();
  const Eigen::VectorXcd c0 = se.right_inv * initial_vec(gen, rho0);
  std::vector<Eigen::VectorXcd> out;
  out.reserve(times.size());
  Eigen::VectorXcd phases(se.values.size());
  for (double t : times) {
    for (Eigen::Index i = 0; i < se.values.size(); ++i)
      phases(i) = std::exp(se.values(i) * t) * c0(i);
    out.push_back(se.right * phases);
  }
  return assemble_trajectory(gen, times, out);
}

void record_observable(Trajectory& traj, const std::string& name, const Operator& op) {
  std::vector<double> series;
  series.reserve(traj.states.size());
  for (const auto& s : traj.states) series.push_back(s.expectation(op));
  traj.observables[name] = std::move(series);
}

DensityMatrix steady_state(const RedfieldGenerator& gen) {
  const SuperopEig& se = gen.superop_eig();
  // locate the zero mode and check it is unique
  Eigen::Index i0 = 0, i1 = -1;
  double best = std::abs(se.values(0)), second = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 1; i < se.values.size(); ++i) {
    const double m = std::abs(se.values(i));
    if (m < best) { second = best; i1 = i0; i0 = i; best = m; }
    else if (m < second) { second = m; i1 = i; }
  }
  (void)i1;
  const double scale = se.values.cwiseAbs().maxCoeff();
  if (best > 1e-8 * std::max(1.0, scale))
    throw std::runtime_error("steady_state: no zero mode (smallest |eigenvalue| = " +
                             std::to_string(best) + ")");
  if (second <= 1e-8 * std::max(1.0, scale))
    throw std::runtime_error("steady_state: degenerate zero mode");

  const Eigen::Index d = gen.dim;
  Eigen::Map<const Matrix> rho_eig_t(se.right.col(i0).data(), d, d);
  Matrix rho_eig = rho_eig_t.transpose();
  Matrix rho_site = gen.eigvecs * rho_eig * gen.eigvecs.adjoint();
  return finalize_state(rho_site);
}

RatePair analytic_rates(double delta, const BathSpec& bath_z, const BathSpec& bath_x,
                        const QuadratureConfig& quad) {
  bath_z.validate();
  bath_x.validate();
  const KappaPair k = kappa_pair(bath_z.epsilon(), bath_x.epsilon(), quad);
  RatePair out;
  const double w_eff = 2.0 * k.kappa_z * delta;   // eigenvalue gap of kappa_z Delta sigma_z
  out.gamma_eff = 2.0 * M_PI * k.kappa_x * k.kappa_x * eff_spectral(w_eff, bath_x) *
                  (2.0 * bose_einstein(w_eff, bath_x.temperature) + 1.0);
  const double w_uw = 2.0 * delta;
  out.gamma_uw = 2.0 * M_PI * brownian_spectral(w_uw, bath_x) *
                 (2.0 * bose_einstein(w_uw, bath_x.temperature) + 1.0);
  return out;
}

DecayFit fit_decay_rate(const std::vector<double>& times, const std::vector<double>& values,
                        double eq_value) {
  if (times.size() != values.size() || times.size() < 4)
    throw std::invalid_argument("fit_decay_rate: need matching series with >= 4 points");
  const double amp0 = std::fabs(values.front() - eq_value);
  if (amp0 <= 0.0) throw std::invalid_argument("fit_decay_rate: zero initial amplitude");
  const double amp_end = std::fabs(values.back() - eq_value);
  if (amp_end >= 0.05 * amp0)
    throw std::invalid_argument("fit_decay_rate: trajectory not decayed to 5% of the initial "
                                "amplitude (insufficient decay)");

  std::vector<double> xs, ys;
  for (size_t i = 0; i < times.size(); ++i) {
    const double amp = std::fabs(values[i] - eq_value);
    if (amp < 1e-3 * amp0 || amp > 0.5 * amp0) continue;
    xs.push_back(times[i]);
    ys.push_back(std::log(amp));
  }
  if (xs.size() < 2) throw std::runtime_error("fit_decay_rate: empty fit window");
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0;
  for (size_t i = 0; i < xs.size(); ++i) { sx += xs[i]; sy += ys[i]; }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  double ss_res = 0, ss_tot = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double pred = my + slope * (xs[i] - mx);
    ss_res += (ys[i] - pred) * (ys[i] - pred);
    ss_tot += (ys[i] - my) * (ys[i] - my);
  }
  DecayFit fit;
  fit.gamma = -slope;
  fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

DecayFit fit_decay_rate(const Trajectory& traj, const std::string& observable, double eq_value) {
  auto it = traj.observables.find(observable);
  if (it == traj.observables.end())
    throw std::invalid_argument("fit_decay_rate: observable '" + observable + "' not recorded");
  return fit_decay_rate(traj.times, it->second, eq_value);
}

}  // namespace effhsim
