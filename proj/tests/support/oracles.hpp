#pragma once

// Reference computations used by the tests. These deliberately avoid the
// library's own code paths (superoperators, SVD trace norms, detection).

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "tniso/channels.hpp"
#include "tniso/codes.hpp"
#include "tniso/random.hpp"

namespace tniso::oracle {

inline ComplexMatrix naive_apply(const std::vector<ComplexMatrix>& kraus, const ComplexMatrix& x) {
  ComplexMatrix out = ComplexMatrix::Zero(kraus.front().rows(), kraus.front().rows());
  for (const auto& k : kraus) {
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      for (Eigen::Index j = 0; j < out.cols(); ++j) {
        Complex s = 0.0;
        for (Eigen::Index a = 0; a < x.rows(); ++a) {
          for (Eigen::Index b = 0; b < x.cols(); ++b) s += k(i, a) * x(a, b) * std::conj(k(j, b));
        }
        out(i, j) += s;
      }
    }
  }
  return out;
}

inline std::vector<ComplexMatrix> kraus_of(const KrausChannel& e) {
  return {e.kraus().begin(), e.kraus().end()};
}

// Sum of |eigenvalues| of the Hermitian part.
inline double hermitian_trace_norm(const ComplexMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (h + h.adjoint()));
  return es.eigenvalues().cwiseAbs().sum();
}

inline ComplexMatrix x_gate() {
  ComplexMatrix x(2, 2);
  x << 0, 1, 1, 0;
  return x;
}

inline ComplexMatrix z_gate() {
  ComplexMatrix z(2, 2);
  z << 1, 0, 0, -1;
  return z;
}

// Cesaro limit of a single-qubit bit flip with 0 < p < 1.
inline ComplexMatrix bit_flip_twirl(const ComplexMatrix& rho) {
  return 0.5 * (rho + x_gate() * rho * x_gate());
}

// Max of f over pure qubit states on a (theta, phi) grid with n x n points.
inline double qubit_grid_max(const std::function<double(const ComplexMatrix&)>& f, int n = 100) {
  double best = 0.0;
  for (int a = 0; a < n; ++a) {
    const double theta = std::numbers::pi * a / (n - 1);
    for (int b = 0; b < n; ++b) {
      const double phi = 2.0 * std::numbers::pi * b / n;
      ComplexVector psi(2);
      psi << std::cos(theta / 2), std::polar(1.0, phi) * std::sin(theta / 2);
      best = std::max(best, f(psi * psi.adjoint()));
    }
  }
  return best;
}

// Fixed points of a superoperator matrix S: kernel of S - I.
inline ComplexMatrix fixed_point_kernel(const ComplexMatrix& s) {
  Eigen::FullPivLU<ComplexMatrix> lu(s - ComplexMatrix::Identity(s.rows(), s.cols()));
  lu.setThreshold(1e-10);
  return lu.kernel();
}

// Three-qubit repetition code facts written out by hand.
inline RealVector repetition_sigma_spectrum(double p) {
  RealVector v(4);
  v << 1.0 - p, p / 3.0, p / 3.0, p / 3.0;
  return v;
}

// Adapted index (x, yz) -> computational index abc.
inline int majority_table(int adapted) {
  static const int table[8] = {0b000, 0b100, 0b010, 0b001, 0b111, 0b011, 0b101, 0b110};
  return table[adapted];
}

// Decoded coherence of the logical |+> state after n rounds of the mixed
// bit/phase flip model with perfect bit-flip recovery.
inline double example2_offdiag(double p, double eps, int n) {
  return 0.5 * std::pow(1.0 - 2.0 * eps * p, n);
}

inline DensityOperator random_full_rank(Eigen::Index d, Rng& rng) { return random_full_rank_state(d, rng); }

inline IsometricEncoding random_encoding(Eigen::Index ds, Eigen::Index df, Eigen::Index dr, Rng& rng) {
  const Eigen::Index dp = ds * df + dr;
  return IsometricEncoding(SubsystemDecomposition(ds, df, dr, haar_unitary(dp, rng)),
                           random_full_rank_state(df, rng));
}

struct PreservedInstance {
  IsometricEncoding phi;
  KrausChannel channel;
  SubsystemDecomposition image;
};

// E = U' (V_S (x) F) U^dag on the code block plus a random channel on its
// complement: preserved by construction.
inline PreservedInstance random_preserved(Eigen::Index ds, Eigen::Index df, Eigen::Index dr,
                                          Eigen::Index dg, Rng& rng) {
  const Eigen::Index dp = ds * df + dr;
  IsometricEncoding phi = random_encoding(ds, df, dr, rng);
  const SubsystemDecomposition image(ds, dg, dp - ds * dg, haar_unitary(dp, rng));
  const ComplexMatrix v = haar_unitary(ds, rng);
  // Enough Kraus operators for an isometric Stinespring dilation.
  const int kmin = static_cast<int>((df + dg - 1) / dg);
  std::uniform_int_distribution<int> kc(kmin, kmin + 2);
  const KrausChannel f = random_channel(df, dg, kc(rng), rng);
  const ComplexMatrix usf = phi.decomposition().code_block();
  const ComplexMatrix usg = image.code_block();
  std::vector<ComplexMatrix> kraus;
  for (const auto& fk : f.kraus()) kraus.push_back(usg * kron(v, fk) * usf.adjoint());
  const ComplexMatrix rest = ComplexMatrix::Identity(dp, dp) - usf * usf.adjoint();
  const KrausChannel n = random_channel(dp, dp, 2, rng);
  for (const auto& nk : n.kraus()) kraus.push_back(nk * rest);
  return {std::move(phi), KrausChannel(std::move(kraus), 1e-9), image};
}

// A random unitary diluted with the completely depolarizing channel: images of
// orthogonal inputs overlap, so no code survives it.
inline KrausChannel random_non_isometric(Eigen::Index dp, Rng& rng) {
  const double w[] = {0.7, 0.3};
  const KrausChannel cs[] = {KrausChannel::unitary(haar_unitary(dp, rng)),
                             completely_depolarizing_channel(dp)};
  return convex_mix(w, cs);
}

}  // namespace tniso::oracle
