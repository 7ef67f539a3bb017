#include "effhsim/reaction_coordinate.hpp"

#include <cmath>
#include <stdexcept>

namespace effhsim {

namespace {

constexpr long kDimGuard = 10000;

// System coupling operator for one bath of the model.
Operator system_coupling(const ModelSpec& model, const BathSpec& bath) {
  if (model.kind == ModelSpec::Kind::Impurity) {
    if (bath.coupling_label == "z") return pauli('z');
    if (bath.coupling_label == "x") return pauli('x');
    throw std::invalid_argument("build_rc_system: impurity bath label must be 'z' or 'x', got '" +
                                bath.coupling_label + "'");
  }
  // chain: bath n couples sigma^a_n + sigma^a_{n+1}, a = x (odd n) / y (even n)
  const int n = std::stoi(bath.coupling_label);
  if (n < 1 || n > model.n_spins)
    throw std::invalid_argument("build_rc_system: chain bath index out of range");
  const char axis = (n % 2 == 1) ? 'x' : 'y';
  const int s1 = n - 1;
  const int s2 = n % model.n_spins;
  return embed_site(pauli(axis), s1, model.n_spins, 2) +
         embed_site(pauli(axis), s2, model.n_spins, 2);
}

Operator bare_system_hamiltonian(const ModelSpec& model) {
  if (model.kind == ModelSpec::Kind::Impurity)
    return Operator(model.delta * pauli('z').mat, true);
  const Eigen::Index dim = static_cast<Eigen::Index>(1) << model.n_spins;
  Matrix h = Matrix::Zero(dim, dim);
  for (int n = 0; n < model.n_spins; ++n) {
    const double d = model.deltas.empty() ? model.delta : model.deltas[n];
    h += d * embed_site(pauli('z'), n, model.n_spins, 2).mat;
  }
  return Operator(std::move(h), true);
}

}  // namespace

Operator ladder_operator(int m_levels) {
  if (m_levels < 1) throw std::invalid_argument("ladder_operator: need at least one level");
  Matrix a = Matrix::Zero(m_levels, m_levels);
  for (int m = 1; m < m_levels; ++m) a(m - 1, m) = std::sqrt(static_cast<double>(m));
  return Operator(std::move(a), false);
}

RCExtendedSystem build_rc_system(const ModelSpec& model, int m_levels) {
  model.validate();
  if (m_levels < 2) throw std::invalid_argument("build_rc_system: m_levels must be >= 2");

  const Operator h_s = bare_system_hamiltonian(model);
  const int n_baths = static_cast<int>(model.baths.size());
  long dim = h_s.dim();
  for (int b = 0; b < n_baths; ++b) {
    dim *= m_levels;
    if (dim > kDimGuard)
      throw std::invalid_argument("build_rc_system: extended dimension exceeds the 1e4 guard");
  }

  const Operator a = ladder_operator(m_levels);
  const Operator x_rc = Operator(a.mat + a.mat.adjoint(), true);
  const Operator n_rc = Operator(a.mat.adjoint() * a.mat, true);
  const Operator id_rc = Operator::identity(m_levels);
  const Operator id_sys = Operator::identity(h_s.dim());

  auto lift = [&](const Operator& sys_part, const Operator& rc_part, int which_rc) {
    std::vector<Operator> factors;
    factors.push_back(sys_part);
    for (int b = 0; b < n_baths; ++b) factors.push_back(b == which_rc ? rc_part : id_rc);
    return tensor(factors);
  };

  RCExtendedSystem out;
  out.truncation_m = m_levels;
  out.factor_dims.push_back(static_cast<int>(h_s.dim()));
  for (int b = 0; b < n_baths; ++b) out.factor_dims.push_back(m_levels);

  Matrix h = lift(h_s, id_rc, -1).mat;
  for (int b = 0; b < n_baths; ++b) {
    const BathSpec& bath = model.baths[b];
    const Operator s_n = system_coupling(model, bath);
    h += bath.lambda * lift(s_n, x_rc, b).mat;
    h += bath.omega_rc * lift(id_sys, n_rc, b).mat;
    BathSpec residual = bath;   // residual bath is the ohmic stage
    out.residual_couplings.emplace_back(lift(id_sys, x_rc, b), residual);
  }
  out.h_rc = Operator(std::move(h), true);
  return out;
}

DensityMatrix rc_equilibrium(const RCExtendedSystem& rc_sys, double beta) {
  if (!(beta > 0)) throw std::invalid_argument("rc_equilibrium: beta must be > 0");
  DensityMatrix full = gibbs_state(rc_sys.h_rc, beta);
  std::vector<int> keep{0};
  return partial_trace(full, rc_sys.factor_dims, keep);
}

ConvergedEquilibrium rc_equilibrium_converged(const ModelSpec& model, double beta,
                                              const Operator& probe_system_op,
                                              double tol, int m_start) {
  if (m_start < 2) throw std::invalid_argument("rc_equilibrium_converged: m_start must be >= 2");
  double prev = 0.0;
  bool have_prev = false;
  for (int m = m_start;; m += 2) {
    RCExtendedSystem sys = build_rc_system(model, m);
    DensityMatrix rho = rc_equilibrium(sys, beta);
    const double val = rho.expectation(probe_system_op);
    if (have_prev && std::fabs(val - prev) < tol)
      return ConvergedEquilibrium{std::move(rho), m, std::fabs(val - prev)};
    prev = val;
    have_prev = true;
  }
}

double check_polaron_ladder_identity(double eps, const Operator& s_op, int m_levels) {
  if (m_levels < 4)
    throw std::invalid_argument("check_polaron_ladder_identity: m_levels must be >= 4");
  const Operator a = ladder_operator(m_levels);
  const Matrix ad_minus_a = a.mat.adjoint() - a.mat;
  const Eigen::Index ds = s_op.dim();
  const Eigen::Index dim = m_levels * ds;

  // U_P = exp[eps (a^dag - a) (x) S]; the exponent is anti-Hermitian, so pass
  // i * exponent to the Hermitian exponential with s = 1.
  Matrix gen(dim, dim);
  {
    std::vector<Operator> fs{Operator(Complex(0, 1) * eps * ad_minus_a, true),
                             Operator(s_op.mat, true)};
    // (i (a^dag - a)) is Hermitian; tensor with Hermitian S stays Hermitian
    gen = tensor(fs).mat;
  }
  const Operator u_p = unitary_exp(Operator(gen, true), 1.0);

  const Matrix a_full = tensor({a, Operator::identity(ds)}).mat;
  const Matrix s_full = tensor({Operator::identity(m_levels), s_op}).mat;
  const Matrix lhs = u_p.mat * a_full * u_p.mat.adjoint();
  const Matrix rhs = a_full - eps * (u_p.mat * s_full * u_p.mat.adjoint());

  // restrict to the lowest floor(M/2) Fock levels: truncation corrupts the top
  const Eigen::Index keep = (m_levels / 2) * ds;
  return (lhs - rhs).topLeftCorner(keep, keep).cwiseAbs().maxCoeff();
}

}  // namespace effhsim
