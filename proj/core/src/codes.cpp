#include "tniso/codes.hpp"

#include <algorithm>
#include <cmath>

#include "tniso/random.hpp"

namespace tniso {

// --- SubsystemDecomposition --------------------------------------------------

SubsystemDecomposition::SubsystemDecomposition(Eigen::Index d_s, Eigen::Index d_f,
                                               Eigen::Index d_r, ComplexMatrix basis)
    : d_s_(d_s), d_f_(d_f), d_r_(d_r), basis_(std::move(basis)) {
  if (d_s < 1 || d_f < 1 || d_r < 0) {
    throw ContractViolation("SubsystemDecomposition: need d_S, d_F >= 1 and d_R >= 0");
  }
  if (basis_.rows() != d_p() || basis_.cols() != d_p()) {
    throw ContractViolation("SubsystemDecomposition: basis must be d_P x d_P with d_P = d_S*d_F + d_R");
  }
  const double r = unitarity_residual(basis_);
  if (r > 1e-10) {
    throw ContractViolation("SubsystemDecomposition: basis is not unitary (residual " +
                            std::to_string(r) + ")");
  }
}

SubsystemDecomposition SubsystemDecomposition::standard(Eigen::Index d_s, Eigen::Index d_f,
                                                        Eigen::Index d_r) {
  const Eigen::Index d = d_s * d_f + d_r;
  return SubsystemDecomposition(d_s, d_f, d_r, ComplexMatrix::Identity(d, d));
}

ComplexMatrix SubsystemDecomposition::code_projector() const {
  const ComplexMatrix c = code_block();
  return c * c.adjoint();
}

ComplexMatrix SubsystemDecomposition::to_physical(const ComplexMatrix& block) const {
  return basis_ * block * basis_.adjoint();
}

ComplexMatrix SubsystemDecomposition::to_block(const ComplexMatrix& physical) const {
  return basis_.adjoint() * physical * basis_;
}

// --- IsometricEncoding -------------------------------------------------------

IsometricEncoding::IsometricEncoding(SubsystemDecomposition decomposition, DensityOperator cofactor)
    : dec_(std::move(decomposition)), tau_(std::move(cofactor)) {
  if (tau_.dim() != dec_.d_f()) {
    throw ContractViolation("IsometricEncoding: cofactor state must live on H_F");
  }
}

RealVector IsometricEncoding::weights() const {
  RealVector w = eigh(tau_.matrix()).values.reverse();
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = std::max(w(i), 0.0);
  return w;
}

bool IsometricEncoding::is_minimal(const Tolerances& tol) const {
  return rank_psd(tau_.hermitian(), tol) == dec_.d_f();
}

IsometricEncoding IsometricEncoding::minimalize(const Tolerances& tol) const {
  const SupportBasis sb = support_basis(tau_.hermitian(), tol);
  const Eigen::Index r = sb.values.size();
  const Eigen::Index d_s = dec_.d_s();
  const Eigen::Index d_f = dec_.d_f();
  const ComplexMatrix w_perp = orthonormal_complement(sb.vectors);
  const ComplexMatrix code = dec_.code_block();

  ComplexMatrix basis(dec_.d_p(), dec_.d_p());
  Eigen::Index col = 0;
  const ComplexMatrix id_s = ComplexMatrix::Identity(d_s, d_s);
  for (Eigen::Index s = 0; s < d_s; ++s) {
    for (Eigen::Index m = 0; m < r; ++m) {
      basis.col(col++) = code * kron(id_s.col(s), sb.vectors.col(m));
    }
  }
  for (Eigen::Index s = 0; s < d_s; ++s) {
    for (Eigen::Index m = 0; m < w_perp.cols(); ++m) {
      basis.col(col++) = code * kron(id_s.col(s), w_perp.col(m));
    }
  }
  for (Eigen::Index k = 0; k < dec_.d_r(); ++k) basis.col(col++) = dec_.basis().col(d_s * d_f + k);

  RealVector tv = sb.values / sb.values.sum();
  return IsometricEncoding(
      SubsystemDecomposition(d_s, r, dec_.d_p() - d_s * r, std::move(basis)),
      DensityOperator(ComplexMatrix(tv.cast<Complex>().asDiagonal())));
}

Superoperator IsometricEncoding::superoperator() const {
  return Superoperator::from_map(logical_dim(), physical_dim(),
                                 [this](const ComplexMatrix& x) { return encode(*this, x); });
}

ComplexMatrix encode(const IsometricEncoding& phi, const ComplexMatrix& x) {
  const auto& dec = phi.decomposition();
  if (x.rows() != dec.d_s() || x.cols() != dec.d_s()) {
    throw ContractViolation("encode: operator dimension differs from d_S");
  }
  const ComplexMatrix block =
      direct_sum(kron(x, phi.cofactor().matrix()), ComplexMatrix::Zero(dec.d_r(), dec.d_r()));
  return dec.to_physical(block);
}

DensityOperator encode(const IsometricEncoding& phi, const DensityOperator& rho) {
  return DensityOperator(encode(phi, rho.matrix()));
}

DensityOperator encode_with_cofactor(const IsometricEncoding& phi, const DensityOperator& rho,
                                     const DensityOperator& cofactor) {
  return encode(IsometricEncoding(phi.decomposition(), cofactor), rho);
}

ComplexMatrix decode(const SubsystemDecomposition& dec, const ComplexMatrix& x) {
  if (x.rows() != dec.d_p() || x.cols() != dec.d_p()) {
    throw ContractViolation("decode: operator dimension differs from d_P");
  }
  const ComplexMatrix block = dec.to_block(x).topLeftCorner(dec.code_dim(), dec.code_dim());
  return partial_trace_second(block, dec.d_s(), dec.d_f());
}

// --- Observables and faithfulness -------------------------------------------

ObservableEncoding::ObservableEncoding(SubsystemDecomposition decomposition, ComplexMatrix remainder)
    : dec_(std::move(decomposition)), x_r_(std::move(remainder)) {
  if (x_r_.size() == 0) x_r_ = ComplexMatrix::Zero(dec_.d_r(), dec_.d_r());
  if (x_r_.rows() != dec_.d_r() || x_r_.cols() != dec_.d_r()) {
    throw ContractViolation("ObservableEncoding: X_R must be d_R x d_R");
  }
  if (hermiticity_residual(x_r_) > kDefaultTolerances.hermiticity) {
    throw ContractViolation("ObservableEncoding: X_R is not Hermitian");
  }
}

HermitianOperator encode_observable(const ObservableEncoding& psi, const HermitianOperator& a) {
  const auto& dec = psi.decomposition();
  if (a.dim() != dec.d_s()) throw ContractViolation("encode_observable: dimension mismatch");
  const ComplexMatrix block =
      direct_sum(kron(a.matrix(), ComplexMatrix::Identity(dec.d_f(), dec.d_f())), psi.remainder());
  return HermitianOperator(dec.to_physical(block));
}

namespace {

struct SpectralCluster {
  double value;
  ComplexMatrix projector;
};

std::vector<SpectralCluster> spectral_clusters(const ComplexMatrix& a, double gap) {
  const EigenPairs e = eigh(a);
  std::vector<SpectralCluster> out;
  Eigen::Index start = 0;
  const Eigen::Index n = e.values.size();
  for (Eigen::Index i = 1; i <= n; ++i) {
    if (i == n || e.values(i) - e.values(i - 1) > gap) {
      const ComplexMatrix v = e.vectors.middleCols(start, i - start);
      out.push_back({e.values.segment(start, i - start).mean(), v * v.adjoint()});
      start = i;
    }
  }
  return out;
}

ComplexMatrix projector_near(const ComplexMatrix& x, double value, double gap) {
  const EigenPairs e = eigh(x);
  ComplexMatrix p = ComplexMatrix::Zero(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    if (std::abs(e.values(i) - value) <= gap) p += e.vectors.col(i) * e.vectors.col(i).adjoint();
  }
  return p;
}

HermitianOperator sample_observable(Eigen::Index d, std::size_t index, Rng& rng) {
  if (index % 8 == 7) return HermitianOperator(ComplexMatrix(0.5 * ComplexMatrix::Identity(d, d)));
  if (index % 4 == 3) {
    const ComplexVector v = haar_pure_vector(d, rng);
    return HermitianOperator(ComplexMatrix(v * v.adjoint()));
  }
  return random_hermitian(d, rng);
}

}  // namespace

FaithfulnessReport verify_faithfulness(const IsometricEncoding& phi, const ObservableMap& psi,
                                       std::size_t samples, std::uint64_t seed,
                                       double spectral_gap_tol) {
  const auto& dec = phi.decomposition();
  const Eigen::Index d = phi.logical_dim();
  const ComplexMatrix p_code = dec.code_projector();
  FaithfulnessReport rep;
  rep.samples = samples;
  for (std::size_t i = 0; i < samples; ++i) {
    Rng rng = stream(seed, i);
    const DensityOperator rho = (i % 2 == 0) ? random_mixed_state(d, rng) : random_pure_state(d, rng);
    const HermitianOperator a = sample_observable(d, i, rng);
    const ComplexMatrix x = psi(a.matrix());
    if (x.rows() != dec.d_p()) throw ContractViolation("verify_faithfulness: Psi has wrong dimension");
    const ComplexMatrix sigma = encode(phi, rho.matrix());

    const Complex lhs = (sigma * x).trace();
    const Complex rhs = (rho.matrix() * a.matrix()).trace();
    rep.statics = std::max(rep.statics, std::abs(lhs - rhs));

    const ComplexMatrix ux = unitary_from_hamiltonian(HermitianOperator(x, 1e-8));
    const ComplexMatrix ua = unitary_from_hamiltonian(a);
    const ComplexMatrix evolved_phys = ux * sigma * ux.adjoint();
    const ComplexMatrix evolved_logical = encode(phi, ComplexMatrix(ua * rho.matrix() * ua.adjoint()));
    rep.unitary_dynamics =
        std::max(rep.unitary_dynamics, trace_norm(ComplexMatrix(evolved_phys - evolved_logical)));

    for (const auto& cluster : spectral_clusters(a.matrix(), spectral_gap_tol)) {
      const ComplexMatrix pi_x = projector_near(x, cluster.value, spectral_gap_tol);
      const ComplexMatrix post = pi_x * sigma * pi_x;
      const ComplexMatrix target = cluster.projector * rho.matrix() * cluster.projector;
      const double decoded = trace_norm(ComplexMatrix(decode(dec, post) - target));
      const double leaked = trace_norm(ComplexMatrix(post - p_code * post * p_code));
      rep.measurement_dynamics = std::max({rep.measurement_dynamics, decoded, leaked});
    }
  }
  return rep;
}

FaithfulnessReport verify_faithfulness(const IsometricEncoding& phi, const ObservableEncoding& psi,
                                       std::size_t samples, std::uint64_t seed,
                                       double spectral_gap_tol) {
  const auto& a = phi.decomposition();
  const auto& b = psi.decomposition();
  if (a.d_s() != b.d_s() || a.d_f() != b.d_f() || a.d_r() != b.d_r() ||
      max_abs(ComplexMatrix(a.basis() - b.basis())) > 1e-10) {
    throw ContractViolation("verify_faithfulness: encodings do not share a decomposition");
  }
  return verify_faithfulness(
      phi,
      [&psi](const ComplexMatrix& m) {
        return encode_observable(psi, HermitianOperator(m)).matrix();
      },
      samples, seed, spectral_gap_tol);
}

// --- PerturbedEncoding -------------------------------------------------------

PerturbedEncoding::PerturbedEncoding(IsometricEncoding nominal, Superoperator perturbation,
                                     double epsilon)
    : nominal_(std::move(nominal)), delta_(std::move(perturbation)), epsilon_(epsilon) {
  const Eigen::Index dq = nominal_.logical_dim();
  if (delta_.dim_in() != dq || delta_.dim_out() != nominal_.physical_dim()) {
    throw ContractViolation("PerturbedEncoding: perturbation dimensions do not match encoding");
  }
  if (!(epsilon >= 0.0)) throw ContractViolation("PerturbedEncoding: epsilon must be >= 0");
  for (Eigen::Index i = 0; i < dq; ++i) {
    for (Eigen::Index j = 0; j < dq; ++j) {
      const ComplexMatrix dij = delta_.image_of_unit(i, j);
      if (std::abs(dij.trace()) > 1e-10) {
        throw ContractViolation("PerturbedEncoding: perturbation images must be traceless");
      }
      if (max_abs(ComplexMatrix(delta_.image_of_unit(j, i) - dij.adjoint())) > 1e-10) {
        throw ContractViolation("PerturbedEncoding: perturbation must preserve Hermiticity");
      }
    }
  }
}

Superoperator PerturbedEncoding::superoperator() const {
  return nominal_.superoperator() + delta_;
}

ComplexMatrix PerturbedEncoding::apply(const ComplexMatrix& rho) const {
  return encode(nominal_, rho) + delta_.apply(rho);
}

// --- Repetition code ---------------------------------------------------------

ComplexMatrix majority_basis() {
  ComplexMatrix b = ComplexMatrix::Zero(8, 8);
  for (int abc = 0; abc < 8; ++abc) {
    const int bits[3] = {(abc >> 2) & 1, (abc >> 1) & 1, abc & 1};
    const int x = (bits[0] + bits[1] + bits[2]) >= 2 ? 1 : 0;
    int yz = 0;
    for (int q = 0; q < 3; ++q) {
      if (bits[q] != x) yz = q + 1;
    }
    b(abc, x * 4 + yz) = 1.0;
  }
  return b;
}

namespace {

ComplexMatrix on_qubit(const ComplexMatrix& op, int qubit) {
  const ComplexMatrix id = pauli::i();
  ComplexMatrix out = qubit == 0 ? op : id;
  for (int q = 1; q < 3; ++q) out = kron(out, q == qubit ? op : id);
  return out;
}

KrausChannel single_error_channel(double p, const ComplexMatrix& op) {
  if (!(p >= 0.0 && p <= 1.0)) throw ContractViolation("error probability out of [0,1]");
  std::vector<ComplexMatrix> ks{std::sqrt(1.0 - p) * ComplexMatrix::Identity(8, 8)};
  for (int q = 0; q < 3; ++q) ks.push_back(std::sqrt(p / 3.0) * on_qubit(op, q));
  return KrausChannel(std::move(ks));
}

}  // namespace

KrausChannel repetition_bit_flip_channel(double p) { return single_error_channel(p, pauli::x()); }

KrausChannel repetition_phase_flip_channel(double p) {
  return single_error_channel(p, pauli::z());
}

RepetitionExample make_repetition_example(double p) {
  if (!(p >= 0.0 && p < 0.5)) throw ContractViolation("make_repetition_example: need 0 <= p < 1/2");
  const ComplexMatrix basis = majority_basis();
  SubsystemDecomposition dec(2, 4, 0, basis);
  IsometricEncoding enc(dec, DensityOperator(matrix_unit(4, 0, 0)));

  std::vector<ComplexMatrix> rk;
  for (Eigen::Index g = 0; g < 4; ++g) {
    rk.push_back(basis * kron(pauli::i(), matrix_unit(4, 0, g)) * basis.adjoint());
  }

  ComplexMatrix sigma = ComplexMatrix::Zero(4, 4);
  sigma(0, 0) = 1.0 - p;
  for (int k = 1; k < 4; ++k) sigma(k, k) = p / 3.0;

  return RepetitionExample{p, std::move(enc), repetition_bit_flip_channel(p),
                           KrausChannel(std::move(rk)), DensityOperator(sigma)};
}

KrausChannel make_example2_channel(double p, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw ContractViolation("make_example2_channel: epsilon out of [0,1]");
  }
  const double w[] = {1.0 - epsilon, epsilon};
  const KrausChannel cs[] = {repetition_bit_flip_channel(p), repetition_phase_flip_channel(p)};
  return convex_mix(w, cs);
}

}  // namespace tniso
