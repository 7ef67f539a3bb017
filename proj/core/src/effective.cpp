#include "effhsim/effective.hpp"

#include <algorithm>
#include <cmath>

#include "effhsim/special_functions.hpp"

namespace effhsim {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// int_0^inf e^{-r^2} r cos(c r) dr = 1/2 - (c/2) F(c/2)
double radial_cos_moment(double c) { return 0.5 - 0.5 * c * dawson(0.5 * c); }

// Multi-index walker over a tensor quadrature grid.
class TensorGrid {
 public:
  TensorGrid(int order, int vars) : order_(order), idx_(vars, 0), done_(false) {}
  bool done() const { return done_; }
  const std::vector<int>& index() const { return idx_; }
  void next() {
    for (size_t k = 0; k < idx_.size(); ++k) {
      if (++idx_[k] < order_) return;
      idx_[k] = 0;
    }
    done_ = true;
  }

 private:
  int order_;
  std::vector<int> idx_;
  bool done_;
};

// Single factorized polaron step,
//   G(H; S, eps) = e^{-(eps^2/2) S^2} sum_n (eps^(2n)/n!) S^n H S^n e^{-(eps^2/2) S^2},
// truncated once terms decay below machine precision.
Operator factorized_polaron_step(const Operator& h, const Operator& s, double eps,
                                 int max_order = 200) {
  // e^{-(eps^2/2) S^2} from the eigendecomposition of S
  const EigResult es = hermitian_eig(s);
  Eigen::VectorXcd damp(es.eigenvalues.size());
  for (Eigen::Index i = 0; i < damp.size(); ++i)
    damp(i) = std::exp(-0.5 * eps * eps * es.eigenvalues(i) * es.eigenvalues(i));
  const Matrix g = es.eigenvectors * damp.asDiagonal() * es.eigenvectors.adjoint();
  Matrix term = h.mat;
  Matrix series = term;
  const double eps2 = eps * eps;
  double scale = std::max(h.max_abs(), 1e-300);
  bool converged = (eps == 0.0);
  for (int n = 1; n <= max_order && !converged; ++n) {
    term = (eps2 / n) * (s.mat * term * s.mat);
    series += term;
    if (term.cwiseAbs().maxCoeff() < 1e-14 * scale) converged = true;
  }
  if (!converged)
    throw std::runtime_error("factorized_polaron_demo: series did not converge below 1e-14 by "
                             "order " + std::to_string(max_order));
  return Operator(g * series * g, false);
}

}  // namespace

double kappa_equal(double eps) {
  return 1.0 - kSqrt2 * eps * dawson(kSqrt2 * eps);
}

KappaPair kappa_pair(double eps_z, double eps_x, const QuadratureConfig& quad) {
  quad.validate();
  if (eps_z < 0 || eps_x < 0)
    throw std::invalid_argument("kappa_pair: epsilon ratios must be >= 0");
  if (eps_z == 0.0 && eps_x == 0.0) return KappaPair{1.0, 1.0};

  const int n_rad = radial_order_for(quad, std::max(eps_z, eps_x));
  const QuadratureRule gl = gauss_laguerre(n_rad);   // u = r^2, weight e^{-u}
  const int n_th = quad.theta_points;

  auto polar = [&](double ez, double ex) {
    double acc = 0.0;
    for (int j = 0; j < n_th; ++j) {
      const double th = 2.0 * M_PI * j / n_th;
      const double cz = ez * std::cos(th), sx = ex * std::sin(th);
      const double ssq = cz * cz + sx * sx;
      if (ssq < 1e-280) {             // integrand limit at s -> 0
        acc += 0.5;
        continue;
      }
      const double s = std::sqrt(ssq);
      double rad = 0.0;               // int_0^inf e^{-r^2} r cos(2 sqrt2 s r) dr
      for (size_t q = 0; q < gl.nodes.size(); ++q)
        rad += gl.weights[q] * std::cos(2.0 * kSqrt2 * s * std::sqrt(gl.nodes[q]));
      rad *= 0.5;
      acc += (cz * cz * 0.5 + sx * sx * rad) / ssq;
    }
    return acc * 2.0 / n_th;          // trapezoid over theta, divided by pi
  };

  KappaPair out;
  out.kappa_z = polar(eps_z, eps_x);
  // swap symmetry kappa_x(ez, ex) = kappa_z(ex, ez)
  out.kappa_x = (eps_z == eps_x) ? out.kappa_z : polar(eps_x, eps_z);
  return out;
}

Operator effective_operator(const Operator& o_s,
                            const std::vector<CouplingTerm>& couplings,
                            const QuadratureConfig& quad) {
  quad.validate();
  if (couplings.empty())
    throw std::invalid_argument("effective_operator: coupling list is empty");
  const Eigen::Index d = o_s.dim();
  double eps_max = 0.0;
  for (const auto& c : couplings) {
    if (c.s_op.dim() != d)
      throw std::invalid_argument("effective_operator: coupling dimension mismatch");
    eps_max = std::max(eps_max, c.epsilon);
  }

  const int n = gh_order_for(quad, eps_max);
  const QuadratureRule gh = gauss_hermite(n);
  const double wnorm = 1.0 / std::sqrt(M_PI);   // the e^{-p^2} measure carries 1/sqrt(pi)

  Matrix out = Matrix::Zero(d, d);
  Matrix gen(d, d);
  for (TensorGrid grid(n, static_cast<int>(couplings.size())); !grid.done(); grid.next()) {
    gen.setZero();
    double w = 1.0;
    for (size_t k = 0; k < couplings.size(); ++k) {
      const int i = grid.index()[k];
      gen += (gh.nodes[i] * couplings[k].epsilon) * couplings[k].s_op.mat;
      w *= gh.weights[i] * wnorm;
    }
    const Operator u = unitary_exp(Operator(gen, true), kSqrt2);
    out += w * (u.mat * o_s.mat * u.mat.adjoint());
  }
  return Operator(std::move(out), o_s.hermitian_hint);
}

EffectiveModel build_impurity_effective(double delta, const BathSpec& bath_z,
                                        const BathSpec& bath_x,
                                        const QuadratureConfig& quad) {
  bath_z.validate();
  bath_x.validate();
  const KappaPair k = kappa_pair(bath_z.epsilon(), bath_x.epsilon(), quad);
  EffectiveModel model;
  model.h_s_eff = Operator((k.kappa_z * delta) * pauli('z').mat, true);
  BathSpec bz = bath_z; bz.coupling_label = "z";
  BathSpec bx = bath_x; bx.coupling_label = "x";
  model.couplings_eff.emplace_back(Operator(k.kappa_z * pauli('z').mat, true), bz);
  model.couplings_eff.emplace_back(Operator(k.kappa_x * pauli('x').mat, true), bx);
  model.stage = SpectralStage::Effective;
  return model;
}

double xi(double eps, const QuadratureConfig& quad) {
  quad.validate();
  if (eps < 0) throw std::invalid_argument("xi: epsilon must be >= 0");
  const int n = gh_order_for(quad, eps);
  const QuadratureRule gh = gauss_hermite(n);
  const double wnorm = 1.0 / std::sqrt(M_PI);
  const double c = 2.0 * kSqrt2 * eps;

  // The two bond factors share only the middle momentum, so conditioning on it
  // reduces the triple integral to nested one-dimensional ones:
  //   xi = 2 E_{p2}[ h(p2)^2 ],
  //   h(p2) = E_{p1}[ (p1^2 cos(c sqrt(p1^2+p2^2)) + p2^2) / (p1^2+p2^2) ].
  double total = 0.0;
  for (int j = 0; j < n; ++j) {
    const double p2 = gh.nodes[j];
    const double p22 = p2 * p2;
    double h = 0.0;
    for (int i = 0; i < n; ++i) {
      const double p1 = gh.nodes[i];
      const double r2 = p1 * p1 + p22;
      const double val = (r2 < 1e-280)
                             ? 1.0
                             : (p1 * p1 * std::cos(c * std::sqrt(r2)) + p22) / r2;
      h += gh.weights[i] * wnorm * val;
    }
    total += gh.weights[j] * wnorm * h * h;
  }
  return 2.0 * total;
}

ChainDressingN2 chain_dressing_n2(double eps) {
  if (eps < 0) throw std::invalid_argument("chain_dressing_n2: epsilon must be >= 0");
  const double f1 = dawson(kSqrt2 * eps);
  const double f2 = dawson(2.0 * kSqrt2 * eps);
  ChainDressingN2 out;
  out.kappa1 = 2.0 - eps / kSqrt2 * (2.0 * f1 + 3.0 * f2);
  out.kappa2 = eps / kSqrt2 * (2.0 * f1 - f2);
  out.kappa3 = 2.0 * kSqrt2 * eps * f2;
  return out;
}

EffectiveModel build_chain_effective(int n_spins, const std::vector<double>& deltas,
                                     double lam, double omega, const QuadratureConfig& quad,
                                     const BathSpec& bath_template) {
  if (n_spins < 2 || n_spins % 2 != 0)
    throw std::invalid_argument("build_chain_effective: n_spins must be even and >= 2");
  if (static_cast<int>(deltas.size()) != n_spins)
    throw std::invalid_argument("build_chain_effective: deltas length must equal n_spins");
  if (lam < 0 || !(omega > 0))
    throw std::invalid_argument("build_chain_effective: need lambda >= 0 and omega > 0");

  const double eps = lam / omega;
  const double kap = kappa_equal(eps);
  const double splitting = 2.0 * kap - 1.0;
  const Eigen::Index dim = static_cast<Eigen::Index>(1) << n_spins;

  auto site = [&](char axis, int n) {           // 1-indexed, periodic
    const int s = ((n - 1) % n_spins + n_spins) % n_spins;
    return embed_site(pauli(axis), s, n_spins, 2);
  };

  Matrix h = Matrix::Zero(dim, dim);
  for (int n = 1; n <= n_spins; ++n)
    h += (splitting * deltas[n - 1]) * site('z', n).mat;

  const double bond_pref = 4.0 * lam * lam / omega;
  if (lam > 0.0) {
    if (n_spins == 2) {
      // Periodic wrap: both baths touch both spins; the N=2 closed forms hold.
      const ChainDressingN2 k = chain_dressing_n2(eps);
      const Matrix xx = (site('x', 1) * site('x', 2)).mat;
      const Matrix yy = (site('y', 1) * site('y', 2)).mat;
      const Matrix zz = (site('z', 1) * site('z', 2)).mat;
      h -= bond_pref * ((k.kappa1 + k.kappa2) * (xx + yy) + 2.0 * k.kappa3 * zz);
    } else {
      const double x = xi(eps, quad);
      for (int n = 1; n <= n_spins; n += 2)
        h -= (bond_pref * x) * (site('x', n) * site('x', n + 1)).mat;
      for (int n = 2; n <= n_spins; n += 2)
        h -= (bond_pref * x) * (site('y', n) * site('y', n + 1)).mat;
    }
  }

  EffectiveModel model;
  model.h_s_eff = Operator(std::move(h), true);
  model.stage = SpectralStage::Effective;
  for (int n = 1; n <= n_spins; ++n) {
    const char axis = (n % 2 == 1) ? 'x' : 'y';
    Matrix s_eff = kap * (site(axis, n) + site(axis, n + 1)).mat;
    BathSpec b = bath_template;
    b.lambda = lam;
    b.omega_rc = omega;
    b.coupling_label = std::to_string(n);
    model.couplings_eff.emplace_back(Operator(std::move(s_eff), true), b);
  }
  return model;
}

Operator factorized_polaron_demo(PolaronOrder order, const Operator& s1, const Operator& s2,
                                 double eps1, double eps2, const Operator& h_s) {
  if (s1.dim() != 2 || s2.dim() != 2 || h_s.dim() != 2)
    throw std::invalid_argument("factorized_polaron_demo: expects 2x2 operators");
  if (order == PolaronOrder::OneThenTwo)
    return factorized_polaron_step(factorized_polaron_step(h_s, s1, eps1), s2, eps2);
  return factorized_polaron_step(factorized_polaron_step(h_s, s2, eps2), s1, eps1);
}

}  // namespace effhsim
