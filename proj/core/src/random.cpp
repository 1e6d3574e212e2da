#include "tniso/random.hpp"

#include <cmath>

#include "tniso/channels.hpp"

namespace tniso {

Rng stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

ComplexMatrix ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0 / std::sqrt(2.0));
  ComplexMatrix g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = Complex(n(rng), n(rng));
  }
  return g;
}

ComplexMatrix haar_isometry(Eigen::Index d_out, Eigen::Index d_in, Rng& rng) {
  if (d_in > d_out) throw ContractViolation("haar_isometry: d_in > d_out");
  const ComplexMatrix g = ginibre(d_out, d_in, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(d_out, d_in);
  const ComplexMatrix r = qr.matrixQR().topRows(d_in).triangularView<Eigen::Upper>();
  // Fix column phases so the distribution is Haar (Mezzadri).
  for (Eigen::Index j = 0; j < d_in; ++j) {
    const Complex rjj = r(j, j);
    const double a = std::abs(rjj);
    if (a > 0.0) q.col(j) *= rjj / a;
  }
  return q;
}

ComplexMatrix haar_unitary(Eigen::Index d, Rng& rng) { return haar_isometry(d, d, rng); }

ComplexVector haar_pure_vector(Eigen::Index d, Rng& rng) {
  ComplexVector v = ginibre(d, 1, rng).col(0);
  return v / v.norm();
}

DensityOperator random_pure_state(Eigen::Index d, Rng& rng) {
  return DensityOperator::pure(haar_pure_vector(d, rng));
}

DensityOperator random_mixed_state(Eigen::Index d, Rng& rng, Eigen::Index env) {
  if (env <= 0) env = d;
  const ComplexVector psi = haar_pure_vector(d * env, rng);
  const ComplexMatrix full = psi * psi.adjoint();
  return DensityOperator(partial_trace_second(full, d, env));
}

DensityOperator random_full_rank_state(Eigen::Index d, Rng& rng) {
  std::exponential_distribution<double> ex(1.0);
  RealVector w(d);
  for (Eigen::Index i = 0; i < d; ++i) w(i) = ex(rng) + 1e-3;
  w /= w.sum();
  const ComplexMatrix u = haar_unitary(d, rng);
  return DensityOperator(ComplexMatrix(u * w.cast<Complex>().asDiagonal() * u.adjoint()));
}

HermitianOperator random_hermitian(Eigen::Index d, Rng& rng) {
  const ComplexMatrix g = ginibre(d, d, rng);
  return HermitianOperator(ComplexMatrix(0.5 * (g + g.adjoint())));
}

KrausChannel random_channel(Eigen::Index d_in, Eigen::Index d_out, Eigen::Index kraus_count,
                            Rng& rng) {
  const ComplexMatrix v = haar_isometry(d_out * kraus_count, d_in, rng);
  std::vector<ComplexMatrix> ks;
  ks.reserve(static_cast<std::size_t>(kraus_count));
  // Rows ordered as (out, env) with env fastest.
  for (Eigen::Index k = 0; k < kraus_count; ++k) {
    ComplexMatrix m(d_out, d_in);
    for (Eigen::Index o = 0; o < d_out; ++o) m.row(o) = v.row(o * kraus_count + k);
    ks.push_back(std::move(m));
  }
  return KrausChannel(std::move(ks));
}

KrausChannel random_unital_channel(Eigen::Index d, Eigen::Index unitaries, Rng& rng) {
  std::exponential_distribution<double> ex(1.0);
  RealVector w(unitaries);
  for (Eigen::Index i = 0; i < unitaries; ++i) w(i) = ex(rng) + 1e-3;
  w /= w.sum();
  std::vector<ComplexMatrix> ks;
  for (Eigen::Index i = 0; i < unitaries; ++i) ks.push_back(std::sqrt(w(i)) * haar_unitary(d, rng));
  return KrausChannel(std::move(ks));
}

}  // namespace tniso
