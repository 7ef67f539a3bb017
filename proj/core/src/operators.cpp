#include "effhsim/operators.hpp"

#include <algorithm>
#include <cmath>

#include <lapacke.h>

namespace effhsim {

namespace {

constexpr double kHermRejectTol = 1e-10;   // relative, hard rejection
constexpr double kHermHintTol = 1e-12;     // relative, required to set the hint

void require_square(const Matrix& m, const char* who) {
  if (m.rows() < 1 || m.rows() != m.cols())
    throw std::invalid_argument(std::string(who) + ": matrix must be square, dim >= 1");
}

void require_same_dim(const Operator& a, const Operator& b, const char* who) {
  if (a.dim() != b.dim())
    throw std::invalid_argument(std::string(who) + ": dimension mismatch (" +
                                std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
}

}  // namespace

Operator::Operator(Matrix m, bool hint) : mat(std::move(m)), hermitian_hint(hint) {
  require_square(mat, "Operator");
}

double Operator::asymmetry() const {
  return (mat - mat.adjoint()).cwiseAbs().maxCoeff();
}

double Operator::max_abs() const { return mat.cwiseAbs().maxCoeff(); }

Operator Operator::hermitian(Matrix m) {
  require_square(m, "Operator::hermitian");
  Operator op(std::move(m));
  const double scale = std::max(op.max_abs(), 1e-300);
  if (op.asymmetry() > kHermHintTol * scale)
    throw std::invalid_argument("Operator::hermitian: matrix is not Hermitian to 1e-12 relative");
  op.hermitian_hint = true;
  return op;
}

Operator Operator::zero(Eigen::Index d) { return Operator(Matrix::Zero(d, d), true); }

Operator Operator::identity(Eigen::Index d) { return Operator(Matrix::Identity(d, d), true); }

Operator operator+(const Operator& a, const Operator& b) {
  require_same_dim(a, b, "operator+");
  return Operator(a.mat + b.mat, a.hermitian_hint && b.hermitian_hint);
}

Operator operator-(const Operator& a, const Operator& b) {
  require_same_dim(a, b, "operator-");
  return Operator(a.mat - b.mat, a.hermitian_hint && b.hermitian_hint);
}

Operator operator*(const Operator& a, const Operator& b) {
  require_same_dim(a, b, "operator*");
  return Operator(a.mat * b.mat, false);
}

Operator operator*(Complex s, const Operator& a) {
  return Operator(s * a.mat, a.hermitian_hint && s.imag() == 0.0 && s.real() >= 0.0);
}

Operator operator*(double s, const Operator& a) {
  return Operator(s * a.mat, a.hermitian_hint);
}

double DensityMatrix::expectation(const Operator& obs) const {
  if (obs.dim() != dim())
    throw std::invalid_argument("DensityMatrix::expectation: dimension mismatch");
  return (op.mat * obs.mat).trace().real();
}

DensityMatrix make_density_matrix(const Matrix& m, PositivityPolicy policy) {
  require_square(m, "make_density_matrix");
  const double tr_err = std::abs(m.trace() - Complex(1.0, 0.0));
  if (tr_err > 1e-9)
    throw std::invalid_argument("make_density_matrix: trace deviates from 1 by " +
                                std::to_string(tr_err));
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-10)
    throw std::invalid_argument("make_density_matrix: not Hermitian, entrywise deviation " +
                                std::to_string(asym));
  DensityMatrix rho;
  rho.op = Operator((m + m.adjoint()) / 2.0, true);
  EigResult eig = hermitian_eig(rho.op);
  rho.min_eigenvalue = eig.eigenvalues(0);
  const double floor = (policy == PositivityPolicy::Strict) ? -1e-8 : -1e-6;
  if (rho.min_eigenvalue < floor)
    throw std::runtime_error("make_density_matrix: negative eigenvalue " +
                             std::to_string(rho.min_eigenvalue) + " below tolerance");
  rho.positivity_flagged = (rho.min_eigenvalue < -1e-8);
  return rho;
}

Operator pauli(char axis) {
  Matrix m(2, 2);
  switch (axis) {
    case 'x': m << 0, 1, 1, 0; break;
    case 'y': m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0); break;
    case 'z': m << 1, 0, 0, -1; break;
    case '0': m << 1, 0, 0, 1; break;
    default:
      throw std::invalid_argument(std::string("pauli: invalid axis '") + axis +
                                  "', expected one of x, y, z, 0");
  }
  return Operator(std::move(m), true);
}

Operator tensor(const std::vector<Operator>& ops) {
  if (ops.empty()) throw std::invalid_argument("tensor: empty operator list");
  Matrix acc = ops.front().mat;
  bool hint = ops.front().hermitian_hint;
  for (size_t k = 1; k < ops.size(); ++k) {
    const Matrix& b = ops[k].mat;
    Matrix next(acc.rows() * b.rows(), acc.cols() * b.cols());
    for (Eigen::Index i = 0; i < acc.rows(); ++i)
      for (Eigen::Index j = 0; j < acc.cols(); ++j)
        next.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = acc(i, j) * b;
    acc = std::move(next);
    hint = hint && ops[k].hermitian_hint;
  }
  return Operator(std::move(acc), hint);
}

Operator embed_site(const Operator& op, int site, int n_sites, int local_dim) {
  if (site < 0 || site >= n_sites)
    throw std::invalid_argument("embed_site: site index out of range");
  if (op.dim() != local_dim)
    throw std::invalid_argument("embed_site: operator dimension does not match local_dim");
  std::vector<Operator> factors;
  factors.reserve(n_sites);
  for (int s = 0; s < n_sites; ++s)
    factors.push_back(s == site ? op : Operator::identity(local_dim));
  return tensor(factors);
}

Operator commutator(const Operator& a, const Operator& b) {
  require_same_dim(a, b, "commutator");
  return Operator(a.mat * b.mat - b.mat * a.mat, false);
}

Operator nested_commutator(const Operator& a, const Operator& b, int j) {
  require_same_dim(a, b, "nested_commutator");
  if (j < 0) throw std::invalid_argument("nested_commutator: order must be >= 0");
  Operator acc = a;
  for (int k = 0; k < j; ++k) acc = commutator(acc, b);
  return acc;
}

EigResult hermitian_eig(const Operator& a) {
  const double scale = std::max(a.max_abs(), 1e-300);
  if (a.asymmetry() > kHermRejectTol * scale)
    throw std::invalid_argument("hermitian_eig: input exceeds Hermiticity tolerance 1e-10");

  const lapack_int n = static_cast<lapack_int>(a.dim());
  Matrix v = (a.mat + a.mat.adjoint()) / 2.0;   // exact-symmetric copy for LAPACK
  RealVector w(n);
  lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n,
                                   reinterpret_cast<lapack_complex_double*>(v.data()), n,
                                   w.data());
  if (info != 0)
    throw std::runtime_error("hermitian_eig: LAPACK zheevd failed, info = " + std::to_string(info));

  // Deterministic basis inside (near-)degenerate clusters: project the standard
  // basis vectors, in index order, onto the cluster subspace and Gram-Schmidt.
  const double cluster_tol = 1e-12 * std::max(1.0, std::abs(w(n - 1)) + std::abs(w(0)));
  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index end = start + 1;
    while (end < n && w(end) - w(end - 1) <= cluster_tol) ++end;
    const Eigen::Index k = end - start;
    if (k > 1) {
      Matrix block = v.middleCols(start, k);
      Matrix fresh(n, k);
      Eigen::Index got = 0;
      for (Eigen::Index i = 0; i < n && got < k; ++i) {
        // projection of e_i onto the cluster subspace
        Eigen::VectorXcd cand = block * (block.adjoint().col(i));
        for (Eigen::Index j = 0; j < got; ++j)
          cand -= fresh.col(j) * (fresh.col(j).dot(cand));
        const double nrm = cand.norm();
        if (nrm > 1e-8) fresh.col(got++) = cand / nrm;
      }
      if (got == k) v.middleCols(start, k) = fresh;
    }
    start = end;
  }

  // Pin each column's global phase: largest-magnitude entry made real positive.
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index imax = 0;
    v.col(c).cwiseAbs().maxCoeff(&imax);
    const Complex piv = v(imax, c);
    if (std::abs(piv) > 0) v.col(c) *= std::conj(piv) / std::abs(piv);
  }

  return EigResult{std::move(w), std::move(v)};
}

Operator unitary_exp(const Operator& h, double s) {
  EigResult eig = hermitian_eig(h);
  Eigen::VectorXcd phases(eig.eigenvalues.size());
  for (Eigen::Index i = 0; i < phases.size(); ++i)
    phases(i) = std::exp(Complex(0.0, -s * eig.eigenvalues(i)));
  return Operator(eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint(), false);
}

DensityMatrix gibbs_state(const Operator& h, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw std::invalid_argument("gibbs_state: beta must be finite and positive");
  EigResult eig = hermitian_eig(h);
  RealVector p = (-beta * (eig.eigenvalues.array() - eig.eigenvalues(0))).exp();
  p /= p.sum();
  Matrix rho = eig.eigenvectors * p.cast<Complex>().asDiagonal() * eig.eigenvectors.adjoint();
  return make_density_matrix(rho);
}

Matrix partial_trace_matrix(const Matrix& rho,
                            const std::vector<int>& factor_dims,
                            const std::vector<int>& keep) {
  long total = 1;
  for (int d : factor_dims) {
    if (d < 1) throw std::invalid_argument("partial_trace: factor dims must be >= 1");
    total *= d;
  }
  if (total != rho.rows())
    throw std::invalid_argument("partial_trace: factor dims do not multiply to the state dim");
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep set must be nonempty");
  for (size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] < 0 || keep[i] >= static_cast<int>(factor_dims.size()))
      throw std::invalid_argument("partial_trace: keep index out of range");
    if (i > 0 && keep[i] <= keep[i - 1])
      throw std::invalid_argument("partial_trace: keep indices must be strictly ascending");
  }

  const int nf = static_cast<int>(factor_dims.size());
  std::vector<bool> kept(nf, false);
  for (int k : keep) kept[k] = true;

  long dim_keep = 1, dim_trace = 1;
  for (int f = 0; f < nf; ++f) (kept[f] ? dim_keep : dim_trace) *= factor_dims[f];

  // strides of each factor in the full row-major composite index
  std::vector<long> stride(nf);
  long s = 1;
  for (int f = nf - 1; f >= 0; --f) { stride[f] = s; s *= factor_dims[f]; }

  // enumerate kept / traced multi-indices as offsets into the full index
  auto offsets = [&](bool want_kept) {
    std::vector<long> out(1, 0);
    for (int f = 0; f < nf; ++f) {
      if (kept[f] != want_kept) continue;
      std::vector<long> next;
      next.reserve(out.size() * factor_dims[f]);
      for (long base : out)
        for (int i = 0; i < factor_dims[f]; ++i) next.push_back(base + i * stride[f]);
      out = std::move(next);
    }
    return out;
  };
  const std::vector<long> keep_off = offsets(true);
  const std::vector<long> trace_off = offsets(false);

  Matrix out = Matrix::Zero(dim_keep, dim_keep);
  for (long i = 0; i < dim_keep; ++i)
    for (long j = 0; j < dim_keep; ++j) {
      Complex acc(0, 0);
      for (long t : trace_off) acc += rho(keep_off[i] + t, keep_off[j] + t);
      out(i, j) = acc;
    }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho,
                            const std::vector<int>& factor_dims,
                            const std::vector<int>& keep) {
  return make_density_matrix(partial_trace_matrix(rho.op.mat, factor_dims, keep),
                             rho.positivity_flagged ? PositivityPolicy::Relaxed
                                                    : PositivityPolicy::Strict);
}

}  // namespace effhsim
