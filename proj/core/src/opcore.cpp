#include "tniso/opcore.hpp"

#include <algorithm>
#include <cmath>

namespace tniso {

namespace {

ComplexMatrix hermitian_part(const ComplexMatrix& a) { return 0.5 * (a + a.adjoint()); }

void require_square(const ComplexMatrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() < 1) {
    throw ContractViolation(std::string(what) + ": expected a nonempty square matrix");
  }
}

// Scale used for absolute clamping of eigenvalues.
double spectral_scale(const RealVector& values) {
  return values.size() == 0 ? 1.0 : std::max(1.0, values.cwiseAbs().maxCoeff());
}

ComplexMatrix reassemble(const EigenPairs& e, const RealVector& f) {
  return e.vectors * f.cast<Complex>().asDiagonal() * e.vectors.adjoint();
}

}  // namespace

HermitianOperator::HermitianOperator(ComplexMatrix m, double tol) : m_(std::move(m)) {
  require_square(m_, "HermitianOperator");
  if (!is_finite(m_)) throw NumericError("HermitianOperator: non-finite entry");
  const double r = hermiticity_residual(m_);
  if (r > tol) {
    throw ContractViolation("HermitianOperator: not Hermitian (residual " + std::to_string(r) +
                            ")");
  }
  m_ = hermitian_part(m_);
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& o) const {
  if (dim() != o.dim()) throw ContractViolation("HermitianOperator: dimension mismatch");
  return HermitianOperator(m_ + o.m_);
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& o) const {
  if (dim() != o.dim()) throw ContractViolation("HermitianOperator: dimension mismatch");
  return HermitianOperator(m_ - o.m_);
}

HermitianOperator HermitianOperator::operator*(double s) const { return HermitianOperator(m_ * s); }

DensityOperator::DensityOperator(ComplexMatrix m, const Tolerances& tol)
    : h_(std::move(m), tol.hermiticity) {
  const double tr = h_.matrix().trace().real();
  if (std::abs(tr - 1.0) > tol.trace) {
    throw ContractViolation("DensityOperator: trace " + std::to_string(tr) + " != 1");
  }
  const double lmin = eigh(h_.matrix()).values.minCoeff();
  if (lmin < -tol.psd) {
    throw ContractViolation("DensityOperator: negative eigenvalue " + std::to_string(lmin));
  }
}

DensityOperator DensityOperator::pure(const ComplexVector& psi) {
  const double n = psi.norm();
  if (n == 0.0) throw ContractViolation("DensityOperator::pure: zero vector");
  const ComplexVector v = psi / n;
  return DensityOperator(ComplexMatrix(v * v.adjoint()));
}

DensityOperator DensityOperator::maximally_mixed(Eigen::Index d) {
  return DensityOperator(ComplexMatrix(ComplexMatrix::Identity(d, d) / static_cast<double>(d)));
}

bool is_finite(const ComplexMatrix& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
    }
  }
  return true;
}

double max_abs(const ComplexMatrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

double hermiticity_residual(const ComplexMatrix& a) { return max_abs(a - a.adjoint()); }

EigenPairs eigh(const ComplexMatrix& a) {
  require_square(a, "eigh");
  if (!is_finite(a)) throw NumericError("eigh: non-finite input");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(a));
  if (es.info() != Eigen::Success) throw NumericError("eigh: decomposition failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

RealVector singular_values(const ComplexMatrix& a) {
  if (!is_finite(a)) throw NumericError("singular_values: non-finite input");
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues();
}

double trace_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  return singular_values(a).sum();
}

std::pair<HermitianOperator, HermitianOperator> positive_negative_parts(const HermitianOperator& z,
                                                                        double tol) {
  const EigenPairs e = eigh(z.matrix());
  RealVector pos = RealVector::Zero(e.values.size());
  RealVector neg = RealVector::Zero(e.values.size());
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    const double v = e.values(i);
    if (v >= tol) pos(i) = v;
    if (v <= -tol) neg(i) = -v;
  }
  return {HermitianOperator(reassemble(e, pos)), HermitianOperator(reassemble(e, neg))};
}

namespace {

// Eigenvalues of a PSD operator with small negatives clamped to zero.
EigenPairs psd_eigen(const HermitianOperator& a, const Tolerances& tol, const char* what) {
  EigenPairs e = eigh(a.matrix());
  const double scale = spectral_scale(e.values);
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    if (e.values(i) < -tol.psd * scale) {
      throw ContractViolation(std::string(what) + ": operator is not PSD (eigenvalue " +
                              std::to_string(e.values(i)) + ")");
    }
    if (std::abs(e.values(i)) < tol.psd * scale) e.values(i) = 0.0;
  }
  return e;
}

double rank_cut(const RealVector& values, const Tolerances& tol) {
  const double lmax = values.size() == 0 ? 0.0 : values.maxCoeff();
  return tol.rank * std::max(lmax, 0.0);
}

}  // namespace

HermitianOperator sqrt_psd(const HermitianOperator& a, const Tolerances& tol) {
  const EigenPairs e = psd_eigen(a, tol, "sqrt_psd");
  return HermitianOperator(reassemble(e, e.values.cwiseSqrt()));
}

HermitianOperator pinv_psd(const HermitianOperator& a, const Tolerances& tol) {
  const EigenPairs e = psd_eigen(a, tol, "pinv_psd");
  const double cut = rank_cut(e.values, tol);
  RealVector f = RealVector::Zero(e.values.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    if (e.values(i) > cut && e.values(i) > 0.0) f(i) = 1.0 / e.values(i);
  }
  return HermitianOperator(reassemble(e, f));
}

HermitianOperator inv_sqrt_psd(const HermitianOperator& a, const Tolerances& tol) {
  const EigenPairs e = psd_eigen(a, tol, "inv_sqrt_psd");
  const double cut = rank_cut(e.values, tol);
  RealVector f = RealVector::Zero(e.values.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    if (e.values(i) > cut && e.values(i) > 0.0) f(i) = 1.0 / std::sqrt(e.values(i));
  }
  return HermitianOperator(reassemble(e, f));
}

SupportBasis support_basis(const HermitianOperator& a, const Tolerances& tol) {
  const EigenPairs e = psd_eigen(a, tol, "support_basis");
  const double cut = rank_cut(e.values, tol);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = e.values.size() - 1; i >= 0; --i) {
    if (e.values(i) > cut && e.values(i) > 0.0) keep.push_back(i);
  }
  SupportBasis out{RealVector(static_cast<Eigen::Index>(keep.size())),
                   ComplexMatrix(a.dim(), static_cast<Eigen::Index>(keep.size()))};
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    out.values(kk) = e.values(keep[k]);
    out.vectors.col(kk) = e.vectors.col(keep[k]);
  }
  return out;
}

HermitianOperator support_projector(const HermitianOperator& a, const Tolerances& tol) {
  const SupportBasis b = support_basis(a, tol);
  return HermitianOperator(ComplexMatrix(b.vectors * b.vectors.adjoint()));
}

Eigen::Index rank_psd(const HermitianOperator& a, const Tolerances& tol) {
  return support_basis(a, tol).values.size();
}

ComplexMatrix unitary_from_hamiltonian(const HermitianOperator& h) {
  const EigenPairs e = eigh(h.matrix());
  ComplexVector phases(e.values.size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) phases(i) = std::exp(Complex(0.0, -e.values(i)));
  return e.vectors * phases.asDiagonal() * e.vectors.adjoint();
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix direct_sum(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out = ComplexMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

ComplexMatrix matrix_unit(Eigen::Index d, Eigen::Index i, Eigen::Index j) {
  ComplexMatrix e = ComplexMatrix::Zero(d, d);
  e(i, j) = 1.0;
  return e;
}

ComplexMatrix partial_trace_first(const ComplexMatrix& x, Eigen::Index da, Eigen::Index db) {
  if (x.rows() != da * db || x.cols() != da * db) {
    throw ContractViolation("partial_trace_first: dimension mismatch");
  }
  ComplexMatrix out = ComplexMatrix::Zero(db, db);
  for (Eigen::Index a = 0; a < da; ++a) out += x.block(a * db, a * db, db, db);
  return out;
}

ComplexMatrix partial_trace_second(const ComplexMatrix& x, Eigen::Index da, Eigen::Index db) {
  if (x.rows() != da * db || x.cols() != da * db) {
    throw ContractViolation("partial_trace_second: dimension mismatch");
  }
  ComplexMatrix out(da, da);
  for (Eigen::Index a = 0; a < da; ++a) {
    for (Eigen::Index b = 0; b < da; ++b) out(a, b) = x.block(a * db, b * db, db, db).trace();
  }
  return out;
}

ComplexMatrix orthonormal_complement(const ComplexMatrix& q) {
  const Eigen::Index n = q.rows();
  const Eigen::Index k = q.cols();
  if (k >= n) return ComplexMatrix(n, 0);
  const ComplexMatrix p = ComplexMatrix::Identity(n, n) - q * q.adjoint();
  const EigenPairs e = eigh(p);
  // Eigenvalues ascending: the top n-k belong to the complement.
  return e.vectors.rightCols(n - k);
}

ComplexMatrix orthonormalize(const ComplexMatrix& q) {
  if (q.cols() == 0) return q;
  Eigen::JacobiSVD<ComplexMatrix> svd(q, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

double unitarity_residual(const ComplexMatrix& u) {
  return max_abs(u.adjoint() * u - ComplexMatrix::Identity(u.cols(), u.cols()));
}

namespace pauli {
ComplexMatrix i() { return ComplexMatrix::Identity(2, 2); }
ComplexMatrix x() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}
ComplexMatrix y() {
  ComplexMatrix m(2, 2);
  m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  return m;
}
ComplexMatrix z() {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}
}  // namespace pauli

}  // namespace tniso
