#ifndef EFFHSIM_OPERATORS_HPP
#define EFFHSIM_OPERATORS_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace effhsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// Dense complex square matrix with Hermiticity metadata. The carrier for
/// Hamiltonians, coupling operators and density matrices.
struct Operator {
  Matrix mat;
  bool hermitian_hint = false;

  Operator() = default;
  explicit Operator(Matrix m, bool hint = false);

  Eigen::Index dim() const { return mat.rows(); }

  /// Entrywise max |A - A^dag|.
  double asymmetry() const;
  /// max |A_ij| over all entries.
  double max_abs() const;
  /// Checked constructor: verifies A = A^dag to 1e-12 * max|A| and sets the hint.
  static Operator hermitian(Matrix m);
  /// Zero matrix of the given dimension.
  static Operator zero(Eigen::Index d);
  /// Identity of the given dimension.
  static Operator identity(Eigen::Index d);
};

Operator operator+(const Operator& a, const Operator& b);
Operator operator-(const Operator& a, const Operator& b);
Operator operator*(const Operator& a, const Operator& b);
Operator operator*(Complex s, const Operator& a);
Operator operator*(double s, const Operator& a);

/// How strictly density-matrix positivity is enforced.
enum class PositivityPolicy {
  Strict,   // smallest eigenvalue >= -1e-8
  Relaxed,  // down to -1e-6 allowed but flagged (Redfield is not CP)
};

/// Unit-trace, Hermitian, (numerically) positive state.
struct DensityMatrix {
  Operator op;
  double min_eigenvalue = 0.0;   // recorded at validation time
  bool positivity_flagged = false;

  Eigen::Index dim() const { return op.dim(); }
  Complex trace() const { return op.mat.trace(); }
  /// Real part of tr(rho * obs).
  double expectation(const Operator& obs) const;
};

/// Validates trace (1e-9), Hermiticity (1e-10 entrywise) and positivity.
DensityMatrix make_density_matrix(const Matrix& m,
                                  PositivityPolicy policy = PositivityPolicy::Strict);

/// Pauli matrix for axis in {x, y, z, 0}; '0' is the 2x2 identity.
Operator pauli(char axis);

/// Kronecker product of the operators in list order.
Operator tensor(const std::vector<Operator>& ops);

/// I (x) ... (x) op (x) ... (x) I with `op` at position `site` of `n_sites`
/// factors of local dimension `local_dim`.
Operator embed_site(const Operator& op, int site, int n_sites, int local_dim);

/// AB - BA.
Operator commutator(const Operator& a, const Operator& b);

/// j-fold nested commutator: Com^0(A,B) = A, Com^j(A,B) = [Com^(j-1)(A,B), B].
Operator nested_commutator(const Operator& a, const Operator& b, int j);

struct EigResult {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // columns, unitary
};

/// Hermitian eigendecomposition, eigenvalues ascending. Degenerate clusters are
/// re-orthonormalized by Gram-Schmidt against the standard basis in index order
/// and every column's global phase is pinned, so repeated runs (and different
/// LAPACK builds) produce the same basis. Rejects inputs with relative
/// asymmetry above 1e-10.
EigResult hermitian_eig(const Operator& a);

/// exp(-i s H) for Hermitian H, via eigendecomposition.
Operator unitary_exp(const Operator& h, double s);

/// exp(-beta H)/Z via shifted eigendecomposition (min eigenvalue subtracted
/// before exponentiating).
DensityMatrix gibbs_state(const Operator& h, double beta);

/// Reduced density matrix over the kept tensor factors. factor_dims lists the
/// dimension of every factor (product must equal rho.dim); keep lists the
/// factor indices to retain, in ascending order.
DensityMatrix partial_trace(const DensityMatrix& rho,
                            const std::vector<int>& factor_dims,
                            const std::vector<int>& keep);

/// Same reduction applied to a plain matrix (no state validation).
Matrix partial_trace_matrix(const Matrix& rho,
                            const std::vector<int>& factor_dims,
                            const std::vector<int>& keep);

}  // namespace effhsim

#endif
