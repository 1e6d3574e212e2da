#include "tniso/channels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tniso {

ComplexVector vec(const ComplexMatrix& x) {
  return Eigen::Map<const ComplexVector>(x.data(), x.size());
}

ComplexMatrix unvec(const ComplexVector& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) throw ContractViolation("unvec: size mismatch");
  return Eigen::Map<const ComplexMatrix>(v.data(), rows, cols);
}

// --- Superoperator -----------------------------------------------------------

Superoperator::Superoperator(Eigen::Index dim_in, Eigen::Index dim_out, ComplexMatrix matrix)
    : dim_in_(dim_in), dim_out_(dim_out), m_(std::move(matrix)) {
  if (dim_in < 1 || dim_out < 1) throw ContractViolation("Superoperator: dimensions must be >= 1");
  if (m_.rows() != dim_out * dim_out || m_.cols() != dim_in * dim_in) {
    throw ContractViolation("Superoperator: matrix shape does not match dimensions");
  }
  if (!is_finite(m_)) throw NumericError("Superoperator: non-finite entry");
}

Superoperator Superoperator::identity(Eigen::Index d) {
  return Superoperator(d, d, ComplexMatrix::Identity(d * d, d * d));
}

Superoperator Superoperator::from_map(Eigen::Index dim_in, Eigen::Index dim_out,
                                      const std::function<ComplexMatrix(const ComplexMatrix&)>& f) {
  ComplexMatrix m(dim_out * dim_out, dim_in * dim_in);
  for (Eigen::Index j = 0; j < dim_in; ++j) {
    for (Eigen::Index i = 0; i < dim_in; ++i) {
      const ComplexMatrix img = f(matrix_unit(dim_in, i, j));
      if (img.rows() != dim_out || img.cols() != dim_out) {
        throw ContractViolation("Superoperator::from_map: image has wrong shape");
      }
      m.col(i + j * dim_in) = vec(img);
    }
  }
  return Superoperator(dim_in, dim_out, std::move(m));
}

Superoperator Superoperator::transpose(Eigen::Index d) {
  return from_map(d, d, [](const ComplexMatrix& x) { return ComplexMatrix(x.transpose()); });
}

ComplexMatrix Superoperator::apply(const ComplexMatrix& x) const {
  if (x.rows() != dim_in_ || x.cols() != dim_in_) {
    throw ContractViolation("Superoperator::apply: dimension mismatch");
  }
  return unvec(m_ * vec(x), dim_out_, dim_out_);
}

ComplexMatrix Superoperator::image_of_unit(Eigen::Index i, Eigen::Index j) const {
  return unvec(m_.col(i + j * dim_in_), dim_out_, dim_out_);
}

Superoperator Superoperator::after(const Superoperator& inner) const {
  if (inner.dim_out_ != dim_in_) throw ContractViolation("Superoperator::after: dimension mismatch");
  return Superoperator(inner.dim_in_, dim_out_, m_ * inner.m_);
}

Superoperator Superoperator::operator+(const Superoperator& o) const {
  if (o.dim_in_ != dim_in_ || o.dim_out_ != dim_out_) {
    throw ContractViolation("Superoperator: dimension mismatch");
  }
  return Superoperator(dim_in_, dim_out_, m_ + o.m_);
}

Superoperator Superoperator::operator-(const Superoperator& o) const { return *this + o * -1.0; }

Superoperator Superoperator::operator*(double s) const {
  return Superoperator(dim_in_, dim_out_, m_ * s);
}

Superoperator Superoperator::power(unsigned k) const {
  if (dim_in_ != dim_out_) throw ContractViolation("Superoperator::power: map is not square");
  ComplexMatrix result = ComplexMatrix::Identity(m_.rows(), m_.cols());
  ComplexMatrix base = m_;
  while (k > 0) {
    if (k & 1u) result = result * base;
    base = base * base;
    k >>= 1u;
  }
  return Superoperator(dim_in_, dim_out_, std::move(result));
}

double max_abs(const Superoperator& s) { return max_abs(s.matrix()); }

// --- KrausChannel ------------------------------------------------------------

double KrausChannel::tp_residual_of(std::span<const ComplexMatrix> kraus) {
  if (kraus.empty()) return 1.0;
  const Eigen::Index d = kraus.front().cols();
  ComplexMatrix acc = ComplexMatrix::Zero(d, d);
  for (const auto& m : kraus) acc += m.adjoint() * m;
  return max_abs(acc - ComplexMatrix::Identity(d, d));
}

KrausChannel::KrausChannel(std::vector<ComplexMatrix> kraus, double tp_tol)
    : kraus_(std::move(kraus)) {
  if (kraus_.empty()) throw ContractViolation("KrausChannel: empty Kraus list");
  dim_out_ = kraus_.front().rows();
  dim_in_ = kraus_.front().cols();
  if (dim_in_ < 1 || dim_out_ < 1) throw ContractViolation("KrausChannel: empty Kraus operator");
  for (const auto& m : kraus_) {
    if (m.rows() != dim_out_ || m.cols() != dim_in_) {
      throw ContractViolation("KrausChannel: Kraus operators have inconsistent shapes");
    }
    if (!is_finite(m)) throw NumericError("KrausChannel: non-finite Kraus entry");
  }
  const double r = tp_residual();
  if (r > tp_tol) {
    throw ContractViolation("KrausChannel: not trace preserving (residual " + std::to_string(r) +
                            ")");
  }
}

KrausChannel KrausChannel::identity(Eigen::Index d) {
  return KrausChannel({ComplexMatrix::Identity(d, d)});
}

KrausChannel KrausChannel::unitary(const ComplexMatrix& u) { return KrausChannel({u}); }

KrausChannel KrausChannel::replacement(Eigen::Index dim_in, const DensityOperator& state) {
  const SupportBasis b = support_basis(state.hermitian());
  std::vector<ComplexMatrix> ks;
  for (Eigen::Index a = 0; a < b.values.size(); ++a) {
    for (Eigen::Index i = 0; i < dim_in; ++i) {
      ComplexMatrix k = ComplexMatrix::Zero(state.dim(), dim_in);
      k.col(i) = std::sqrt(b.values(a)) * b.vectors.col(a);
      ks.push_back(std::move(k));
    }
  }
  return KrausChannel(std::move(ks));
}

double KrausChannel::tp_residual() const { return tp_residual_of(kraus_); }

Superoperator KrausChannel::superoperator() const {
  ComplexMatrix s = ComplexMatrix::Zero(dim_out_ * dim_out_, dim_in_ * dim_in_);
  for (const auto& m : kraus_) s += kron(m.conjugate(), m);
  return Superoperator(dim_in_, dim_out_, std::move(s));
}

KrausChannel KrausChannel::prune(double tol) const {
  std::vector<ComplexMatrix> kept;
  for (const auto& m : kraus_) {
    if (m.norm() >= tol) kept.push_back(m);
  }
  if (kept.empty()) throw ContractViolation("KrausChannel::prune: every operator was dropped");
  return KrausChannel(std::move(kept), std::max(kDefaultTolerances.tp, 10.0 * tol));
}

ComplexMatrix apply(const KrausChannel& e, const ComplexMatrix& x) {
  if (x.rows() != e.dim_in() || x.cols() != e.dim_in()) {
    throw ContractViolation("apply: operator dimension does not match channel input");
  }
  ComplexMatrix out = ComplexMatrix::Zero(e.dim_out(), e.dim_out());
  for (const auto& m : e.kraus()) out.noalias() += m * x * m.adjoint();
  return out;
}

HermitianOperator apply(const KrausChannel& e, const HermitianOperator& x) {
  return HermitianOperator(apply(e, x.matrix()));
}

DensityOperator apply(const KrausChannel& e, const DensityOperator& rho) {
  return DensityOperator(apply(e, rho.matrix()));
}

KrausChannel compose(const KrausChannel& e2, const KrausChannel& e1) {
  if (e2.dim_in() != e1.dim_out()) throw ContractViolation("compose: dimension mismatch");
  std::vector<ComplexMatrix> ks;
  ks.reserve(e1.kraus_count() * e2.kraus_count());
  for (const auto& b : e2.kraus()) {
    for (const auto& a : e1.kraus()) ks.push_back(b * a);
  }
  return KrausChannel(std::move(ks), 1e-9);
}

namespace {

void check_weights(std::span<const double> weights) {
  if (weights.empty()) throw ContractViolation("weights: empty list");
  for (double w : weights) {
    if (!(w >= 0.0)) throw ContractViolation("weights: negative or NaN weight");
  }
  const double s = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(s - 1.0) > 1e-12) {
    throw ContractViolation("weights: sum " + std::to_string(s) + " != 1");
  }
}

}  // namespace

KrausChannel convex_mix(std::span<const double> weights, std::span<const KrausChannel> channels) {
  check_weights(weights);
  if (weights.size() != channels.size()) {
    throw ContractViolation("convex_mix: weights and channels differ in length");
  }
  std::vector<ComplexMatrix> ks;
  for (std::size_t c = 0; c < channels.size(); ++c) {
    if (channels[c].dim_in() != channels.front().dim_in() ||
        channels[c].dim_out() != channels.front().dim_out()) {
      throw ContractViolation("convex_mix: channels have different dimensions");
    }
    const double s = std::sqrt(weights[c]);
    for (const auto& m : channels[c].kraus()) ks.push_back(s * m);
  }
  return KrausChannel(std::move(ks));
}

Superoperator power_mix(const KrausChannel& e, std::span<const double> weights) {
  check_weights(weights);
  if (e.dim_in() != e.dim_out()) throw ContractViolation("power_mix: channel is not square");
  const ComplexMatrix s = e.superoperator().matrix();
  ComplexMatrix p = ComplexMatrix::Identity(s.rows(), s.cols());
  ComplexMatrix acc = ComplexMatrix::Zero(s.rows(), s.cols());
  for (double w : weights) {
    acc += w * p;
    p = s * p;
  }
  return Superoperator(e.dim_in(), e.dim_out(), std::move(acc));
}

namespace {

std::vector<ComplexMatrix> single_qubit_mixture(double p, const ComplexMatrix& op) {
  if (!(p >= 0.0 && p <= 1.0)) throw ContractViolation("probability out of [0,1]");
  return {std::sqrt(1.0 - p) * pauli::i(), std::sqrt(p) * op};
}

}  // namespace

KrausChannel bit_flip_channel(double p) { return KrausChannel(single_qubit_mixture(p, pauli::x())); }

KrausChannel phase_flip_channel(double p) {
  return KrausChannel(single_qubit_mixture(p, pauli::z()));
}

KrausChannel depolarizing_channel(Eigen::Index d, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ContractViolation("depolarizing_channel: p out of [0,1]");
  const KrausChannel id = KrausChannel::identity(d);
  const KrausChannel full = completely_depolarizing_channel(d);
  const double w[] = {1.0 - p, p};
  const KrausChannel cs[] = {id, full};
  return convex_mix(w, cs);
}

KrausChannel completely_depolarizing_channel(Eigen::Index d) {
  return KrausChannel::replacement(d, DensityOperator::maximally_mixed(d));
}

// --- Cesaro projector --------------------------------------------------------

namespace {

Superoperator cesaro_spectral(const Superoperator& s, const CesaroOptions& opts) {
  const Eigen::Index n = s.matrix().rows();
  const ComplexMatrix a = s.matrix() - ComplexMatrix::Identity(n, n);
  Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& sv = svd.singularValues();
  const double cut = opts.kernel_tol * std::max(1.0, sv.size() ? sv(0) : 0.0);
  Eigen::Index m = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) <= cut) ++m;
  }
  if (m == 0) {
    // Only possible for non-TP input; a CPTP map always has a fixed state.
    throw NumericError("cesaro_projector: map has no fixed points");
  }
  // Right kernel of (S - I) holds the fixed points, left kernel the conserved
  // functionals; singular values are sorted descending.
  const ComplexMatrix r = svd.matrixV().rightCols(m);
  const ComplexMatrix l = svd.matrixU().rightCols(m);
  const ComplexMatrix gram = l.adjoint() * r;
  Eigen::FullPivLU<ComplexMatrix> lu(gram);
  if (!lu.isInvertible()) {
    throw NumericError("cesaro_projector: eigenvalue 1 is not semisimple");
  }
  ComplexMatrix p = r * lu.solve(l.adjoint());
  return Superoperator(s.dim_in(), s.dim_out(), std::move(p));
}

Superoperator cesaro_iterative(const Superoperator& s, const CesaroOptions& opts) {
  const Eigen::Index n = s.matrix().rows();
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  // Binomial averaging: L = (I + S) / 2 keeps the eigenvalue-1 spectral
  // projector of S and pushes every other eigenvalue inside the unit disk,
  // so L^N converges to the Cesaro limit. N doubles by squaring.
  ComplexMatrix l = (id + s.matrix()) * 0.5;
  std::uint64_t horizon = 1;
  double residual = 0.0;
  while (horizon < opts.max_n) {
    ComplexMatrix next = l * l;
    horizon *= 2;
    const double step = max_abs(next - l);
    const double fixed_residual = max_abs(s.matrix() * next - next);
    l = std::move(next);
    residual = std::max(step, fixed_residual);
    if (residual <= opts.tol) return Superoperator(s.dim_in(), s.dim_out(), std::move(l));
  }
  throw ConvergenceError("cesaro_projector: iterative averaging did not converge", residual);
}

}  // namespace

Superoperator cesaro_projector(const Superoperator& s, const CesaroOptions& opts) {
  if (s.dim_in() != s.dim_out()) throw ContractViolation("cesaro_projector: map is not square");
  return opts.method == CesaroMethod::spectral ? cesaro_spectral(s, opts)
                                               : cesaro_iterative(s, opts);
}

Superoperator cesaro_projector(const KrausChannel& e, const CesaroOptions& opts) {
  return cesaro_projector(e.superoperator(), opts);
}

// --- Support invariance ------------------------------------------------------

SupportInvariance check_support_invariance(const KrausChannel& e, const ComplexMatrix& p_in,
                                           const ComplexMatrix& p_out, double tol) {
  if (e.dim_in() != e.dim_out()) throw ContractViolation("check_support_invariance: not square");
  if (p_in.rows() != e.dim_in() || p_out.rows() != e.dim_out()) {
    throw ContractViolation("check_support_invariance: projector dimension mismatch");
  }
  const ComplexMatrix leak = ComplexMatrix::Identity(e.dim_out(), e.dim_out()) - p_out;
  double r = 0.0;
  for (const auto& m : e.kraus()) r = std::max(r, max_abs(leak * m * p_in));
  return {r <= tol, r};
}

SupportInvariance check_support_invariance(const KrausChannel& e, const DensityOperator& rho_bar,
                                           double tol) {
  if (rho_bar.dim() != e.dim_in()) {
    throw ContractViolation("check_support_invariance: state dimension mismatch");
  }
  const ComplexMatrix p = support_projector(rho_bar.hermitian()).matrix();
  return check_support_invariance(e, p, p, tol);
}

// --- Contraction witness -----------------------------------------------------

double contraction_witness(const KrausChannel& e, std::size_t samples, std::uint64_t seed,
                           const StateSampler& sampler) {
  double worst = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    Rng rng = stream(seed, s);
    for (int attempt = 0; attempt < 64; ++attempt) {
      const DensityOperator r1 = sampler(rng);
      const DensityOperator r2 = sampler(rng);
      const ComplexMatrix diff = r1.matrix() - r2.matrix();
      const double den = trace_norm(diff);
      if (den <= 1e-12) continue;
      const double num = trace_norm(apply(e, diff));
      worst = std::max(worst, num / den);
      break;
    }
  }
  return worst;
}

double contraction_witness(const KrausChannel& e, std::size_t samples, std::uint64_t seed) {
  const Eigen::Index d = e.dim_in();
  std::size_t counter = 0;
  return contraction_witness(e, samples, seed, [d, &counter](Rng& rng) {
    return (counter++ % 2 == 0) ? random_pure_state(d, rng) : random_mixed_state(d, rng);
  });
}

}  // namespace tniso
