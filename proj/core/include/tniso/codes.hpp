#pragma once

// Subsystem decompositions H_P = H_S (x) H_F (+) H_R, isometric state
// encodings rho -> U (rho (x) tau (+) 0_R) U^dag, observable encodings
// A -> U (A (x) I_F (+) X_R) U^dag, and the three-qubit repetition code used
// throughout the tests.

#include <cstdint>
#include <functional>

#include "tniso/channels.hpp"
#include "tniso/opcore.hpp"

namespace tniso {

// `basis` maps the standard basis of H_P to the adapted basis: its first
// d_S*d_F columns span H_S (x) H_F in row-major (s, f) order (column
// s*d_F + f), the remaining d_R columns span H_R.
class SubsystemDecomposition {
 public:
  SubsystemDecomposition(Eigen::Index d_s, Eigen::Index d_f, Eigen::Index d_r, ComplexMatrix basis);

  static SubsystemDecomposition standard(Eigen::Index d_s, Eigen::Index d_f, Eigen::Index d_r);

  Eigen::Index d_s() const noexcept { return d_s_; }
  Eigen::Index d_f() const noexcept { return d_f_; }
  Eigen::Index d_r() const noexcept { return d_r_; }
  Eigen::Index d_p() const noexcept { return d_s_ * d_f_ + d_r_; }
  Eigen::Index code_dim() const noexcept { return d_s_ * d_f_; }
  const ComplexMatrix& basis() const noexcept { return basis_; }

  // Columns spanning H_S (x) H_F and H_R.
  ComplexMatrix code_block() const { return basis_.leftCols(code_dim()); }
  ComplexMatrix remainder_block() const { return basis_.rightCols(d_r_); }
  ComplexMatrix code_projector() const;

  // Physical operator for a block operator on H_S (x) H_F (+) H_R.
  ComplexMatrix to_physical(const ComplexMatrix& block) const;
  ComplexMatrix to_block(const ComplexMatrix& physical) const;

 private:
  Eigen::Index d_s_;
  Eigen::Index d_f_;
  Eigen::Index d_r_;
  ComplexMatrix basis_;
};

class IsometricEncoding {
 public:
  IsometricEncoding(SubsystemDecomposition decomposition, DensityOperator cofactor);

  const SubsystemDecomposition& decomposition() const noexcept { return dec_; }
  const DensityOperator& cofactor() const noexcept { return tau_; }
  Eigen::Index logical_dim() const noexcept { return dec_.d_s(); }
  Eigen::Index physical_dim() const noexcept { return dec_.d_p(); }

  // Spectrum of the cofactor, descending (length d_F).
  RealVector weights() const;
  bool is_minimal(const Tolerances& tol = kDefaultTolerances) const;
  // Equivalent encoding with d_F = rank(tau); the dropped cofactor directions
  // join H_R.
  IsometricEncoding minimalize(const Tolerances& tol = kDefaultTolerances) const;

  Superoperator superoperator() const;

 private:
  SubsystemDecomposition dec_;
  DensityOperator tau_;
};

// Linear extension to arbitrary operators on H_Q.
ComplexMatrix encode(const IsometricEncoding& phi, const ComplexMatrix& x);
DensityOperator encode(const IsometricEncoding& phi, const DensityOperator& rho);
// Member of the robust set: same decomposition, different cofactor state.
DensityOperator encode_with_cofactor(const IsometricEncoding& phi, const DensityOperator& rho,
                                     const DensityOperator& cofactor);

// Rotate into the adapted basis, keep the H_S (x) H_F block, trace out H_F.
ComplexMatrix decode(const SubsystemDecomposition& dec, const ComplexMatrix& x);
inline ComplexMatrix decode(const IsometricEncoding& phi, const ComplexMatrix& x) {
  return decode(phi.decomposition(), x);
}

class ObservableEncoding {
 public:
  // remainder: Hermitian d_R x d_R; an empty matrix means X_R = 0.
  explicit ObservableEncoding(SubsystemDecomposition decomposition,
                              ComplexMatrix remainder = ComplexMatrix());

  const SubsystemDecomposition& decomposition() const noexcept { return dec_; }
  const ComplexMatrix& remainder() const noexcept { return x_r_; }

 private:
  SubsystemDecomposition dec_;
  ComplexMatrix x_r_;
};

HermitianOperator encode_observable(const ObservableEncoding& psi, const HermitianOperator& a);

struct FaithfulnessReport {
  double statics = 0.0;
  double unitary_dynamics = 0.0;
  double measurement_dynamics = 0.0;
  std::size_t samples = 0;

  bool passes(double tol) const {
    return statics <= tol && unitary_dynamics <= tol && measurement_dynamics <= tol;
  }
};

using ObservableMap = std::function<ComplexMatrix(const ComplexMatrix&)>;

// Max residuals of the statics / unitary-dynamics / projective-measurement
// conditions over random (rho, A) samples. Eigenvalues closer than
// spectral_gap_tol are treated as one eigenspace.
FaithfulnessReport verify_faithfulness(const IsometricEncoding& phi, const ObservableEncoding& psi,
                                       std::size_t samples, std::uint64_t seed,
                                       double spectral_gap_tol = 1e-8);
FaithfulnessReport verify_faithfulness(const IsometricEncoding& phi, const ObservableMap& psi,
                                       std::size_t samples, std::uint64_t seed,
                                       double spectral_gap_tol = 1e-8);

// Phi~ = Phi + Delta, Delta Hermiticity preserving with traceless images.
class PerturbedEncoding {
 public:
  PerturbedEncoding(IsometricEncoding nominal, Superoperator perturbation, double epsilon);

  const IsometricEncoding& nominal() const noexcept { return nominal_; }
  const Superoperator& perturbation() const noexcept { return delta_; }
  double epsilon() const noexcept { return epsilon_; }

  Superoperator superoperator() const;
  ComplexMatrix apply(const ComplexMatrix& rho) const;

 private:
  IsometricEncoding nominal_;
  Superoperator delta_;
  double epsilon_;
};

// --- Three-qubit repetition code ---------------------------------------------
//
// Basis convention: U|abc> = |x> (x) |yz>, x = majority(abc), yz = position
// of the deviating bit: 00 none, 01 qubit 1 (a), 10 qubit 2 (b), 11 qubit 3
// (c). Qubit 1 is the most significant bit of the standard index.

// Columns are the computational states |abc> in adapted order (x, yz).
ComplexMatrix majority_basis();

// {sqrt(1-p) I, sqrt(p/3) X_i}: at most one flip, total probability p.
KrausChannel repetition_bit_flip_channel(double p);
// {sqrt(1-p) I, sqrt(p/3) Z_i}.
KrausChannel repetition_phase_flip_channel(double p);

struct RepetitionExample {
  double p = 0.0;
  IsometricEncoding encoding;  // d_S=2, d_F=4, d_R=0, tau=|00><00|
  KrausChannel noise;
  KrausChannel recovery;  // I_S (x) A, A(X) = trace(X) |00><00|
  DensityOperator sigma;  // image of tau under the induced cofactor channel
};

RepetitionExample make_repetition_example(double p);

// (1-eps) bit-flip + eps phase-flip.
KrausChannel make_example2_channel(double p, double epsilon);

}  // namespace tniso
