#pragma once

// Dense complex-operator algebra shared by every other module.
//
// All operators are dense Eigen matrices. Hermitian and density operators are
// thin wrappers that validate their invariants once at construction; the
// numerical kernels below accept plain ComplexMatrix so they can be reused on
// non-Hermitian operator-basis elements (E_ij) as well.

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace tniso {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Centralized tolerances. Rank decisions are relative to the largest
// eigenvalue; everything else is absolute.
struct Tolerances {
  double hermiticity = 1e-10;
  double psd = 1e-10;
  double trace = 1e-10;
  double rank = 1e-9;
  double tp = 1e-10;
};

inline constexpr Tolerances kDefaultTolerances{};

// Violated precondition (bad dimensions, non-Hermitian input, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Decomposition failure, typically non-finite input.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class HermitianOperator {
 public:
  explicit HermitianOperator(ComplexMatrix m, double tol = kDefaultTolerances.hermiticity);

  const ComplexMatrix& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }

  HermitianOperator operator+(const HermitianOperator& o) const;
  HermitianOperator operator-(const HermitianOperator& o) const;
  HermitianOperator operator*(double s) const;

 private:
  ComplexMatrix m_;
};

class DensityOperator {
 public:
  explicit DensityOperator(ComplexMatrix m, const Tolerances& tol = kDefaultTolerances);
  explicit DensityOperator(const HermitianOperator& h, const Tolerances& tol = kDefaultTolerances)
      : DensityOperator(h.matrix(), tol) {}

  static DensityOperator pure(const ComplexVector& psi);
  static DensityOperator maximally_mixed(Eigen::Index d);

  const ComplexMatrix& matrix() const noexcept { return h_.matrix(); }
  const HermitianOperator& hermitian() const noexcept { return h_; }
  Eigen::Index dim() const noexcept { return h_.dim(); }

 private:
  HermitianOperator h_;
};

// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
struct EigenPairs {
  RealVector values;
  ComplexMatrix vectors;
};

bool is_finite(const ComplexMatrix& a);
double max_abs(const ComplexMatrix& a);
double hermiticity_residual(const ComplexMatrix& a);

// Hermitian part is used; callers are expected to have checked Hermiticity.
EigenPairs eigh(const ComplexMatrix& a);
RealVector singular_values(const ComplexMatrix& a);

// Sum of singular values.
double trace_norm(const ComplexMatrix& a);
inline double trace_norm(const HermitianOperator& a) { return trace_norm(a.matrix()); }

// Z = Z+ - Z-, eigenvalues with |lambda| below tol are clamped to zero.
std::pair<HermitianOperator, HermitianOperator> positive_negative_parts(
    const HermitianOperator& z, double tol = kDefaultTolerances.psd);

HermitianOperator sqrt_psd(const HermitianOperator& a, const Tolerances& tol = kDefaultTolerances);
HermitianOperator pinv_psd(const HermitianOperator& a, const Tolerances& tol = kDefaultTolerances);
// pinv(sqrt(A)) in one pass.
HermitianOperator inv_sqrt_psd(const HermitianOperator& a, const Tolerances& tol = kDefaultTolerances);
HermitianOperator support_projector(const HermitianOperator& a,
                                    const Tolerances& tol = kDefaultTolerances);
Eigen::Index rank_psd(const HermitianOperator& a, const Tolerances& tol = kDefaultTolerances);

// Orthonormal basis (columns) of the range of a PSD operator, ordered by
// decreasing eigenvalue, together with those eigenvalues.
struct SupportBasis {
  RealVector values;
  ComplexMatrix vectors;
};
SupportBasis support_basis(const HermitianOperator& a, const Tolerances& tol = kDefaultTolerances);

// exp(-i H)
ComplexMatrix unitary_from_hamiltonian(const HermitianOperator& h);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix direct_sum(const ComplexMatrix& a, const ComplexMatrix& b);
// Matrix unit |i><j| of size d x d.
ComplexMatrix matrix_unit(Eigen::Index d, Eigen::Index i, Eigen::Index j);

// For X on H_A (x) H_B with dims (da, db).
ComplexMatrix partial_trace_first(const ComplexMatrix& x, Eigen::Index da, Eigen::Index db);
ComplexMatrix partial_trace_second(const ComplexMatrix& x, Eigen::Index da, Eigen::Index db);

// Orthonormal basis of the orthogonal complement of the column span of q
// (q assumed to have orthonormal columns).
ComplexMatrix orthonormal_complement(const ComplexMatrix& q);
// Nearest matrix with orthonormal columns (polar factor).
ComplexMatrix orthonormalize(const ComplexMatrix& q);
double unitarity_residual(const ComplexMatrix& u);

namespace pauli {
ComplexMatrix i();
ComplexMatrix x();
ComplexMatrix y();
ComplexMatrix z();
}  // namespace pauli

}  // namespace tniso
