#pragma once

// CPTP maps in Kraus form and their superoperator (Liouville) matrices.
//
// Vectorization convention: column stacking. vec(X) stacks the columns of X,
// so vec(A X B) = (B^T (x) A) vec(X) and a Kraus channel {M_k} has
// superoperator sum_k conj(M_k) (x) M_k. The operator-basis element
// |i><j| on C^d sits at vec index i + j*d.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "tniso/opcore.hpp"
#include "tniso/random.hpp"

namespace tniso {

ComplexVector vec(const ComplexMatrix& x);
ComplexMatrix unvec(const ComplexVector& v, Eigen::Index rows, Eigen::Index cols);

// Linear map O(C^dim_in) -> O(C^dim_out) as a (dim_out^2 x dim_in^2) matrix.
class Superoperator {
 public:
  Superoperator(Eigen::Index dim_in, Eigen::Index dim_out, ComplexMatrix matrix);

  static Superoperator identity(Eigen::Index d);
  static Superoperator from_map(Eigen::Index dim_in, Eigen::Index dim_out,
                                const std::function<ComplexMatrix(const ComplexMatrix&)>& f);
  // The linear transpose map X -> X^T on C^d.
  static Superoperator transpose(Eigen::Index d);

  Eigen::Index dim_in() const noexcept { return dim_in_; }
  Eigen::Index dim_out() const noexcept { return dim_out_; }
  const ComplexMatrix& matrix() const noexcept { return m_; }

  ComplexMatrix apply(const ComplexMatrix& x) const;
  // Image of the basis element |i><j|.
  ComplexMatrix image_of_unit(Eigen::Index i, Eigen::Index j) const;

  // (*this) o (inner)
  Superoperator after(const Superoperator& inner) const;
  Superoperator operator+(const Superoperator& o) const;
  Superoperator operator-(const Superoperator& o) const;
  Superoperator operator*(double s) const;
  Superoperator power(unsigned k) const;

 private:
  Eigen::Index dim_in_;
  Eigen::Index dim_out_;
  ComplexMatrix m_;
};

double max_abs(const Superoperator& s);

class KrausChannel {
 public:
  // Validates dimensions and trace preservation.
  explicit KrausChannel(std::vector<ComplexMatrix> kraus, double tp_tol = kDefaultTolerances.tp);

  static KrausChannel identity(Eigen::Index d);
  static KrausChannel unitary(const ComplexMatrix& u);
  // X -> trace(X) * state
  static KrausChannel replacement(Eigen::Index dim_in, const DensityOperator& state);

  Eigen::Index dim_in() const noexcept { return dim_in_; }
  Eigen::Index dim_out() const noexcept { return dim_out_; }
  std::span<const ComplexMatrix> kraus() const noexcept { return kraus_; }
  std::size_t kraus_count() const noexcept { return kraus_.size(); }

  // max |sum_k M_k^dag M_k - I|
  double tp_residual() const;
  static double tp_residual_of(std::span<const ComplexMatrix> kraus);

  Superoperator superoperator() const;

  // Drops Kraus operators with Frobenius norm below tol. Never called
  // implicitly.
  KrausChannel prune(double tol) const;

 private:
  Eigen::Index dim_in_ = 0;
  Eigen::Index dim_out_ = 0;
  std::vector<ComplexMatrix> kraus_;
};

ComplexMatrix apply(const KrausChannel& e, const ComplexMatrix& x);
HermitianOperator apply(const KrausChannel& e, const HermitianOperator& x);
DensityOperator apply(const KrausChannel& e, const DensityOperator& rho);

// e2 o e1
KrausChannel compose(const KrausChannel& e2, const KrausChannel& e1);
KrausChannel convex_mix(std::span<const double> weights, std::span<const KrausChannel> channels);
// sum_i p_i E^i with E^0 the identity.
Superoperator power_mix(const KrausChannel& e, std::span<const double> weights);

// Single-qubit and small standard channels.
KrausChannel bit_flip_channel(double p);
KrausChannel phase_flip_channel(double p);
KrausChannel depolarizing_channel(Eigen::Index d, double p);
KrausChannel completely_depolarizing_channel(Eigen::Index d);

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

enum class CesaroMethod { spectral, iterative };

struct CesaroOptions {
  CesaroMethod method = CesaroMethod::spectral;
  // Iterative: largest power N of (I + S)/2 (rounded up to a power of two).
  std::uint64_t max_n = std::uint64_t{1} << 50;
  double tol = 1e-10;
  // Spectral: singular values of (S - I) at or below this count as kernel.
  double kernel_tol = 1e-9;
};

// Limit of the Cesaro means (1/(N+1)) sum_{i<=N} E^i: the projector onto the
// fixed points of E along the remaining spectral subspaces.
Superoperator cesaro_projector(const KrausChannel& e, const CesaroOptions& opts = {});
Superoperator cesaro_projector(const Superoperator& s, const CesaroOptions& opts = {});

struct SupportInvariance {
  bool invariant = false;
  double residual = 0.0;
};

// Whether E(D(supp rho)) stays inside D(supp rho): max_k |(I-P) M_k P| <= tol.
SupportInvariance check_support_invariance(const KrausChannel& e, const DensityOperator& rho_bar,
                                           double tol);
// Same check for arbitrary input/output projectors: max_k |(I-Pout) M_k Pin|.
SupportInvariance check_support_invariance(const KrausChannel& e, const ComplexMatrix& p_in,
                                           const ComplexMatrix& p_out, double tol);

// Max over sampled state pairs of |E(r1)-E(r2)|_1 / |r1-r2|_1. Each sample
// draws from its own stream derived from (seed, index).
using StateSampler = std::function<DensityOperator(Rng&)>;
double contraction_witness(const KrausChannel& e, std::size_t samples, std::uint64_t seed);
double contraction_witness(const KrausChannel& e, std::size_t samples, std::uint64_t seed,
                           const StateSampler& sampler);

}  // namespace tniso
