#include "tniso/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "tniso/random.hpp"

namespace tniso {

const char* to_string(Conjugation c) {
  switch (c) {
    case Conjugation::unitary:
      return "unitary";
    case Conjugation::anti_unitary:
      return "anti-unitary";
    case Conjugation::mixed:
      return "mixed";
  }
  return "?";
}

const char* to_string(RecoveryStrategy s) {
  return s == RecoveryStrategy::replace ? "replace" : "time_reversal";
}

const char* to_string(TimeReversalForm f) {
  switch (f) {
    case TimeReversalForm::none:
      return "none";
    case TimeReversalForm::standard:
      return "standard";
    case TimeReversalForm::printed:
      return "printed";
  }
  return "?";
}

RecoveryStrategy parse_strategy(const std::string& name) {
  if (name == "time_reversal" || name == "petz") return RecoveryStrategy::time_reversal;
  if (name == "replace") return RecoveryStrategy::replace;
  throw ContractViolation("unknown recovery strategy '" + name + "'");
}

// --- detection ---------------------------------------------------------------

namespace {

// Columns {s*r + m : s} of the adapted basis.
ComplexMatrix weight_block(const ComplexMatrix& basis, Eigen::Index d, Eigen::Index r,
                           Eigen::Index m) {
  ComplexMatrix b(basis.rows(), d);
  for (Eigen::Index s = 0; s < d; ++s) b.col(s) = basis.col(s * r + m);
  return b;
}

void check_map_precondition(const Superoperator& phi) {
  const Eigen::Index d = phi.dim_in();
  const double tol = 1e-10 * static_cast<double>(std::max<Eigen::Index>(1, d));
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const ComplexMatrix x = phi.image_of_unit(i, j);
      if (!is_finite(x)) throw NumericError("detect_structure: non-finite map");
      const Complex expect = i == j ? 1.0 : 0.0;
      if (std::abs(x.trace() - expect) > tol) {
        throw ContractViolation("detect_structure: map is not trace preserving");
      }
      if (max_abs(ComplexMatrix(phi.image_of_unit(j, i) - x.adjoint())) > tol) {
        throw ContractViolation("detect_structure: map is not Hermiticity preserving");
      }
    }
  }
}

StructureReport fail(const char* stage, double residual) {
  StructureReport r;
  r.found = false;
  r.failed_stage = stage;
  r.residual = residual;
  return r;
}

struct AlignedVector {
  double weight;
  bool anti;
  ComplexVector v;
};

}  // namespace

IsometricEncoding StructureReport::encoding() const {
  if (!found) throw ContractViolation("StructureReport: no structure was found");
  if (conjugation != Conjugation::unitary) {
    throw ContractViolation("StructureReport: structure is not of unitary type");
  }
  return IsometricEncoding(*decomposition, *cofactor);
}

ComplexMatrix reconstruct(const StructureReport& s, const ComplexMatrix& rho) {
  if (!s.decomposition) throw ContractViolation("reconstruct: no structure");
  const auto& dec = *s.decomposition;
  const Eigen::Index d = dec.d_s();
  const Eigen::Index r = dec.d_f();
  if (rho.rows() != d || rho.cols() != d) throw ContractViolation("reconstruct: dimension mismatch");
  const ComplexMatrix rho_t = rho.transpose();
  ComplexMatrix out = ComplexMatrix::Zero(dec.d_p(), dec.d_p());
  for (Eigen::Index m = 0; m < r; ++m) {
    const ComplexMatrix b = weight_block(dec.basis(), d, r, m);
    const ComplexMatrix& x = s.anti_unitary_weights[static_cast<std::size_t>(m)] ? rho_t : rho;
    out += s.weights(m) * b * x * b.adjoint();
  }
  return out;
}

StructureReport detect_structure(const Superoperator& phi, double tol, std::uint64_t seed) {
  check_map_precondition(phi);
  const Eigen::Index d = phi.dim_in();
  const Eigen::Index dp = phi.dim_out();

  std::vector<ComplexMatrix> diag;
  std::vector<EigenPairs> eig;
  double neg = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    diag.push_back(HermitianOperator(phi.image_of_unit(j, j), 1.0).matrix());
    eig.push_back(eigh(diag.back()));
    neg = std::max(neg, -eig.back().values.minCoeff());
  }
  if (neg > tol) return fail("positivity", neg);

  double overlap = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index k = j + 1; k < d; ++k) {
      overlap = std::max(overlap, std::abs((diag[j] * diag[k]).trace()));
    }
  }
  if (overlap > tol) return fail("orthogonality", overlap);

  double spread = 0.0;
  for (Eigen::Index j = 1; j < d; ++j) {
    spread = std::max(spread, (eig[j].values - eig[0].values).cwiseAbs().maxCoeff());
  }
  if (spread > tol) return fail("spectrum", spread);

  // Support of the first image, descending.
  const RealVector& vals = eig[0].values;
  const double cut = 1e-9 * std::max(vals.maxCoeff(), 0.0);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = vals.size() - 1; i >= 0; --i) {
    if (vals(i) > cut) keep.push_back(i);
  }
  const Eigen::Index r = static_cast<Eigen::Index>(keep.size());
  if (r == 0 || d * r > dp) return fail("spectrum", spread);

  std::vector<ComplexMatrix> w;  // Phi(|j><0|), j >= 1
  for (Eigen::Index j = 1; j < d; ++j) w.push_back(phi.image_of_unit(j, 0));

  // Within each cluster of equal weights, separate unitary-type from
  // anti-unitary-type directions: A = sum_j W_j^dag W_j / w^2 is (d-1) on the
  // former and 0 on the latter.
  std::vector<AlignedVector> aligned;
  const double cluster_gap = std::max(tol, 1e-12);
  std::size_t start = 0;
  while (start < keep.size()) {
    std::size_t end = start + 1;
    while (end < keep.size() && vals(keep[end - 1]) - vals(keep[end]) <= cluster_gap) ++end;
    const Eigen::Index n = static_cast<Eigen::Index>(end - start);
    ComplexMatrix q(dp, n);
    for (Eigen::Index c = 0; c < n; ++c) q.col(c) = eig[0].vectors.col(keep[start + c]);
    const double wmean = vals(keep[start]);

    ComplexMatrix a = ComplexMatrix::Zero(n, n);
    for (const auto& wj : w) a += q.adjoint() * wj.adjoint() * wj * q;
    a /= wmean * wmean;
    const EigenPairs ae = eigh(a);
    const double split = 0.5 * static_cast<double>(d - 1);

    for (int pass = 0; pass < 2; ++pass) {
      const bool anti = pass == 1;
      std::vector<Eigen::Index> sel;
      for (Eigen::Index c = 0; c < n; ++c) {
        const bool is_anti = d > 1 && ae.values(c) < split;
        if (is_anti == anti) sel.push_back(c);
      }
      if (sel.empty()) continue;
      ComplexMatrix sub(dp, static_cast<Eigen::Index>(sel.size()));
      for (std::size_t c = 0; c < sel.size(); ++c) {
        sub.col(static_cast<Eigen::Index>(c)) = q * ae.vectors.col(sel[c]);
      }
      const EigenPairs se = eigh(ComplexMatrix(sub.adjoint() * diag[0] * sub));
      for (Eigen::Index c = se.values.size() - 1; c >= 0; --c) {
        aligned.push_back({se.values(c), anti, sub * se.vectors.col(c)});
      }
    }
    start = end;
  }
  std::stable_sort(aligned.begin(), aligned.end(),
                   [](const AlignedVector& x, const AlignedVector& y) { return x.weight > y.weight; });

  ComplexMatrix cols(dp, d * r);
  double align = 0.0;
  for (Eigen::Index m = 0; m < r; ++m) {
    const auto& av = aligned[static_cast<std::size_t>(m)];
    cols.col(m) = av.v;
    for (Eigen::Index j = 1; j < d; ++j) {
      const auto& wj = w[static_cast<std::size_t>(j - 1)];
      const ComplexVector vj = (av.anti ? ComplexVector(wj.adjoint() * av.v) : ComplexVector(wj * av.v)) /
                               av.weight;
      align = std::max(align, std::abs(vj.norm() - 1.0));
      cols.col(j * r + m) = vj;
    }
  }
  align = std::max(align, max_abs(ComplexMatrix(cols.adjoint() * cols -
                                                ComplexMatrix::Identity(d * r, d * r))));
  const ComplexMatrix q = orthonormalize(cols);
  ComplexMatrix basis(dp, dp);
  basis.leftCols(d * r) = q;
  if (dp > d * r) basis.rightCols(dp - d * r) = orthonormal_complement(q);

  StructureReport rep;
  rep.alignment_residual = align;
  rep.weights = RealVector(r);
  bool any_anti = false;
  bool any_unitary = false;
  for (Eigen::Index m = 0; m < r; ++m) {
    const auto& av = aligned[static_cast<std::size_t>(m)];
    rep.weights(m) = av.weight;
    rep.anti_unitary_weights.push_back(av.anti);
    (av.anti ? any_anti : any_unitary) = true;
  }
  rep.conjugation = any_anti ? (any_unitary ? Conjugation::mixed : Conjugation::anti_unitary)
                             : Conjugation::unitary;
  try {
    rep.decomposition.emplace(d, r, dp - d * r, basis);
    const RealVector tv = rep.weights / rep.weights.sum();
    rep.cofactor.emplace(ComplexMatrix(tv.cast<Complex>().asDiagonal()));
  } catch (const ContractViolation&) {
    return fail("verification", std::max(align, 1.0));
  }

  double res = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const ComplexMatrix diff = phi.image_of_unit(i, j) - reconstruct(rep, matrix_unit(d, i, j));
      res = std::max(res, trace_norm(diff));
    }
  }
  constexpr std::size_t kVerificationStates = 20;
  for (std::size_t k = 0; k < kVerificationStates; ++k) {
    Rng rng = stream(seed, k);
    const DensityOperator rho = k % 2 == 0 ? random_pure_state(d, rng) : random_mixed_state(d, rng);
    res = std::max(res, trace_norm(ComplexMatrix(phi.apply(rho.matrix()) - reconstruct(rep, rho.matrix()))));
  }
  rep.residual = res;
  rep.found = res <= tol;
  if (!rep.found) rep.failed_stage = "verification";
  return rep;
}

// --- fixed / preserved / noiseless -------------------------------------------

namespace {

double max_image_trace_norm(const Superoperator& s) {
  double out = 0.0;
  const Eigen::Index d = s.dim_in();
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) out = std::max(out, trace_norm(s.image_of_unit(i, j)));
  }
  return out;
}

void require_channel_on_code(const IsometricEncoding& phi, const KrausChannel& e) {
  if (e.dim_in() != phi.physical_dim()) {
    throw ContractViolation("channel input dimension differs from the physical dimension of the code");
  }
}

}  // namespace

Verdict is_fixed(const Superoperator& phi, const Superoperator& e, double tol) {
  if (e.dim_in() != phi.dim_out() || e.dim_out() != phi.dim_out()) {
    throw ContractViolation("is_fixed: dimension mismatch");
  }
  const double r = max_image_trace_norm(e.after(phi) - phi);
  return {r <= tol, r};
}

Verdict is_fixed(const IsometricEncoding& phi, const KrausChannel& e, double tol) {
  require_channel_on_code(phi, e);
  return is_fixed(phi.superoperator(), e.superoperator(), tol);
}

Preservation is_preserved(const IsometricEncoding& phi, const KrausChannel& e, double tol) {
  require_channel_on_code(phi, e);
  Preservation p;
  p.structure = detect_structure(e.superoperator().after(phi.superoperator()), tol);
  p.preserved = p.structure.found;
  return p;
}

NoiselessCertificate noiseless_certificate(const IsometricEncoding& phi, const KrausChannel& e,
                                           unsigned horizon, double tol) {
  require_channel_on_code(phi, e);
  if (e.dim_out() != e.dim_in()) throw ContractViolation("noiseless_certificate: channel must be square");
  NoiselessCertificate c;
  c.horizon = horizon;
  const Superoperator se = e.superoperator();
  const Superoperator sphi = phi.superoperator();
  Superoperator cur = sphi;
  for (unsigned k = 1; k <= horizon; ++k) {
    cur = se.after(cur);
    const StructureReport s = detect_structure(cur, tol);
    c.power_residual = std::max(c.power_residual, s.residual);
    if (!s.found) {
      c.failed_power = k;
      break;
    }
  }
  const Superoperator cinf = cesaro_projector(se).after(sphi);
  c.fixed_code = detect_structure(cinf, tol);
  c.fixed_residual = is_fixed(cinf, se, tol).residual;
  c.accepted = c.failed_power == 0 && c.fixed_code->found && c.fixed_residual <= tol;
  return c;
}

// --- correction --------------------------------------------------------------

namespace {

struct ImageData {
  IsometricEncoding code;  // minimal
  StructureReport image;
  std::vector<ComplexMatrix> cofactor_kraus;  // E_k : H_F -> H_G
};

ImageData analyse_image(const IsometricEncoding& phi, const KrausChannel& e, double tol) {
  require_channel_on_code(phi, e);
  IsometricEncoding code = phi.minimalize();
  StructureReport image = detect_structure(e.superoperator().after(code.superoperator()), tol);
  if (!image.found) {
    throw NotCorrectable("code is not preserved by the channel (stage " + image.failed_stage +
                             "), so no recovery exists",
                         image.residual);
  }
  if (image.conjugation != Conjugation::unitary) {
    throw NotCorrectable("image of the code is not of unitary type", image.residual);
  }
  const auto& dec = code.decomposition();
  const auto& idec = *image.decomposition;
  const Eigen::Index ds = dec.d_s();
  const Eigen::Index r = dec.d_f();
  const Eigen::Index rp = idec.d_f();
  const ComplexMatrix usf = dec.code_block();
  const ComplexMatrix usg = idec.code_block();
  std::vector<ComplexMatrix> ek;
  for (const auto& m : e.kraus()) {
    const ComplexMatrix k = usg.adjoint() * m * usf;
    ComplexMatrix f = ComplexMatrix::Zero(rp, r);
    for (Eigen::Index s = 0; s < ds; ++s) f += k.block(s * rp, s * r, rp, r);
    ek.push_back(f / static_cast<double>(ds));
  }
  return {std::move(code), std::move(image), std::move(ek)};
}

struct CofactorRecovery {
  std::vector<ComplexMatrix> kraus;
  bool valid = false;
};

CofactorRecovery validate(std::vector<ComplexMatrix> kraus, const ComplexMatrix& sigma,
                          const ComplexMatrix& tau, double tol) {
  const Eigen::Index rp = sigma.rows();
  ComplexMatrix tp = -ComplexMatrix::Identity(rp, rp);
  ComplexMatrix img = -tau;
  for (const auto& k : kraus) {
    tp += k.adjoint() * k;
    img += k * sigma * k.adjoint();
  }
  const bool ok = is_finite(tp) && max_abs(tp) <= tol && trace_norm(img) <= tol;
  return {std::move(kraus), ok};
}

}  // namespace

Correction build_correction(const IsometricEncoding& phi, const KrausChannel& e,
                            RecoveryStrategy strategy, double tol) {
  ImageData data = analyse_image(phi, e, tol);
  const auto& dec = data.code.decomposition();
  const auto& idec = *data.image.decomposition;
  const Eigen::Index ds = dec.d_s();
  const Eigen::Index r = dec.d_f();
  const Eigen::Index rp = idec.d_f();
  const ComplexMatrix tau = data.code.cofactor().matrix();
  const ComplexMatrix sigma = data.image.cofactor->matrix();

  Correction out{KrausChannel::identity(1), strategy, false, TimeReversalForm::none, std::nullopt, 0.0,
                 data.image};
  std::vector<ComplexMatrix> cof;

  if (strategy == RecoveryStrategy::time_reversal) {
    const HermitianOperator hs(sigma);
    const HermitianOperator ht(tau);
    const ComplexMatrix tau_sqrt = sqrt_psd(ht).matrix();
    const ComplexMatrix sig_isqrt = inv_sqrt_psd(hs).matrix();
    std::vector<ComplexMatrix> standard;
    for (const auto& ek : data.cofactor_kraus) standard.push_back(tau_sqrt * ek.adjoint() * sig_isqrt);
    CofactorRecovery std_form = validate(std::move(standard), sigma, tau, tol);

    std::optional<CofactorRecovery> printed;
    if (r == rp) {
      const ComplexMatrix sig_sqrt = sqrt_psd(hs).matrix();
      const ComplexMatrix tau_isqrt = inv_sqrt_psd(ht).matrix();
      std::vector<ComplexMatrix> pk;
      for (const auto& ek : data.cofactor_kraus) pk.push_back(sig_sqrt * ek.adjoint() * tau_isqrt);
      printed = validate(std::move(pk), sigma, tau, tol);
      out.printed_form_valid = printed->valid;
    }
    if (std_form.valid) {
      cof = std::move(std_form.kraus);
      out.form = TimeReversalForm::standard;
    } else if (printed && printed->valid) {
      cof = std::move(printed->kraus);
      out.form = TimeReversalForm::printed;
    } else {
      out.fell_back = true;
      out.strategy_used = RecoveryStrategy::replace;
    }
  }
  if (cof.empty()) {
    for (Eigen::Index f = 0; f < r; ++f) {
      for (Eigen::Index g = 0; g < rp; ++g) {
        ComplexMatrix k = ComplexMatrix::Zero(r, rp);
        k(f, g) = std::sqrt(std::max(tau(f, f).real(), 0.0));
        cof.push_back(std::move(k));
      }
    }
  }

  const ComplexMatrix usf = dec.code_block();
  const ComplexMatrix usg = idec.code_block();
  const ComplexMatrix id_s = ComplexMatrix::Identity(ds, ds);
  std::vector<ComplexMatrix> kraus;
  for (const auto& rk : cof) kraus.push_back(usf * kron(id_s, rk) * usg.adjoint());

  // Route everything outside supp E(C) to the encoded reference state.
  const Eigen::Index dt = idec.d_r();
  if (dt > 0) {
    const ComplexMatrix t = idec.remainder_block();
    const ComplexMatrix ref = encode(data.code, matrix_unit(ds, 0, 0));
    const SupportBasis sb = support_basis(HermitianOperator(ref));
    for (Eigen::Index a = 0; a < sb.values.size(); ++a) {
      for (Eigen::Index i = 0; i < dt; ++i) {
        kraus.push_back(std::sqrt(sb.values(a)) * sb.vectors.col(a) * t.col(i).adjoint());
      }
    }
  }
  out.recovery = KrausChannel(std::move(kraus), 1e-8);
  out.fixed_residual = is_fixed(phi.superoperator(), out.recovery.superoperator().after(e.superoperator()),
                                tol)
                           .residual;
  return out;
}

ProtectableCode derive_protectable_code(const IsometricEncoding& phi, const KrausChannel& e,
                                        double tol, RecoveryStrategy strategy) {
  Correction c = build_correction(phi, e, strategy, tol);
  IsometricEncoding code = c.image.encoding();
  const Superoperator er = e.superoperator().after(c.recovery.superoperator());
  const Verdict v = is_fixed(code.superoperator(), er, tol);
  return {std::move(code), std::move(c.recovery), v.value, v.residual};
}

UnitaryCorrectability unitary_correctability(const IsometricEncoding& phi, const KrausChannel& e,
                                             double tol) {
  const ImageData data = analyse_image(phi, e, tol);
  const auto& dec = data.code.decomposition();
  const auto& idec = *data.image.decomposition;
  const Eigen::Index ds = dec.d_s();
  const Eigen::Index r = dec.d_f();
  const Eigen::Index rp = idec.d_f();
  const Eigen::Index dp = dec.d_p();

  UnitaryCorrectability out;
  out.code_rank = ds * r;
  out.image_rank = ds * rp;
  if (e.dim_out() != dp) return out;

  const ComplexMatrix& u = dec.basis();
  const ComplexMatrix& up = idec.basis();
  // Target columns paired with the image basis columns in order.
  ComplexMatrix target(dp, dp);
  Eigen::Index col = 0;
  std::vector<bool> used(static_cast<std::size_t>(dp), false);
  Eigen::Index spare = ds * r;
  for (Eigen::Index s = 0; s < ds; ++s) {
    for (Eigen::Index m = 0; m < rp; ++m) {
      const Eigen::Index src = m < r ? s * r + m : spare++;
      target.col(col++) = u.col(src);
      used[static_cast<std::size_t>(src)] = true;
    }
  }
  for (Eigen::Index c = 0; c < dp; ++c) {
    if (!used[static_cast<std::size_t>(c)]) target.col(col++) = u.col(c);
  }
  const ComplexMatrix v = target * up.adjoint();
  out.unitary = v;

  if (rp <= r) {
    try {
      const NsFactorization ns = check_ns_factorization(compose(KrausChannel::unitary(v), e), dec, tol);
      out.unitarily_correctable = ns.factorizes;
      out.residual = ns.residual;
    } catch (const ContractViolation&) {
      out.unitarily_correctable = false;
      out.residual = 1.0;
    }
    out.unitarily_recoverable = out.unitarily_correctable;
    return out;
  }

  // Restore into the extended decomposition H_S (x) H_F' with dim H_F' = rank(sigma).
  const SubsystemDecomposition ext(ds, rp, dp - ds * rp, target);
  const IsometricEncoding restored(ext, *data.image.cofactor);
  const Superoperator sv = KrausChannel::unitary(v).superoperator().after(e.superoperator());
  const Superoperator diff = sv.after(data.code.superoperator()) - restored.superoperator();
  out.residual = max_image_trace_norm(diff);
  out.unitarily_recoverable = out.residual <= tol;
  return out;
}

NsFactorization check_ns_factorization(const KrausChannel& e, const SubsystemDecomposition& dec,
                                       double tol, const NsOptions& opts) {
  const Eigen::Index ds = dec.d_s();
  const Eigen::Index df = dec.d_f();
  const Eigen::Index k = opts.input_cofactor_dim == 0 ? df : opts.input_cofactor_dim;
  if (k < 0 || k > df) throw ContractViolation("check_ns_factorization: bad input cofactor dimension");
  if (e.dim_in() != dec.d_p() || e.dim_out() != dec.d_p()) {
    throw ContractViolation("check_ns_factorization: channel dimension differs from d_P");
  }
  const ComplexMatrix& u = dec.basis();
  ComplexMatrix uin(dec.d_p(), ds * k);
  for (Eigen::Index s = 0; s < ds; ++s) {
    for (Eigen::Index f = 0; f < k; ++f) uin.col(s * k + f) = u.col(s * df + f);
  }
  const ComplexMatrix uout = dec.code_block();
  const SupportInvariance inv =
      check_support_invariance(e, ComplexMatrix(uin * uin.adjoint()), dec.code_projector(), tol);
  if (!inv.invariant) {
    throw ContractViolation("check_ns_factorization: channel leaks out of H_S (x) H_F (residual " +
                            std::to_string(inv.residual) + ")");
  }

  std::vector<ComplexMatrix> ks;
  for (const auto& m : e.kraus()) ks.push_back(uout.adjoint() * m * uin);

  NsFactorization out;
  if (opts.absorb_logical_unitary) {
    const auto big = std::max_element(ks.begin(), ks.end(), [](const auto& a, const auto& b) {
      return a.squaredNorm() < b.squaredNorm();
    });
    ComplexMatrix realigned(ds * ds, df * k);
    for (Eigen::Index s = 0; s < ds; ++s) {
      for (Eigen::Index sp = 0; sp < ds; ++sp) {
        for (Eigen::Index f = 0; f < df; ++f) {
          for (Eigen::Index g = 0; g < k; ++g) {
            realigned(s * ds + sp, f * k + g) = (*big)(s * df + f, sp * k + g);
          }
        }
      }
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(realigned, Eigen::ComputeThinU);
    ComplexMatrix a(ds, ds);
    for (Eigen::Index s = 0; s < ds; ++s) {
      for (Eigen::Index sp = 0; sp < ds; ++sp) a(s, sp) = svd.matrixU()(s * ds + sp, 0);
    }
    const ComplexMatrix v = orthonormalize(a);
    const ComplexMatrix undo = kron(ComplexMatrix(v.adjoint()), ComplexMatrix::Identity(df, df));
    for (auto& kk : ks) kk = undo * kk;
    out.logical_unitary = v;
  }

  const ComplexMatrix id_s = ComplexMatrix::Identity(ds, ds);
  std::vector<ComplexMatrix> fk;
  for (const auto& kk : ks) {
    ComplexMatrix f = ComplexMatrix::Zero(df, k);
    for (Eigen::Index s = 0; s < ds; ++s) f += kk.block(s * df, s * k, df, k);
    f /= static_cast<double>(ds);
    out.residual = std::max(out.residual, (kk - kron(id_s, f)).norm());
    fk.push_back(std::move(f));
  }
  out.factorizes = out.residual <= tol;
  if (out.factorizes) out.cofactor_channel.emplace(std::move(fk), 10.0 * tol + 1e-9);
  return out;
}

// --- classification ----------------------------------------------------------

void check_implications(const ClassificationReport& r) {
  auto fail = [](const char* what) { throw std::logic_error(std::string("classification: ") + what); };
  if (r.fixed.value && !r.preserved.value) fail("fixed code is not preserved");
  if (r.preserved.value != r.correctable.value) fail("preserved and correctable disagree");
  if (r.correctable.value != r.completely_correctable.value) {
    fail("correctable and completely correctable disagree");
  }
  if (r.unitarily_correctable.value && !r.correctable.value) {
    fail("unitarily correctable code is not correctable");
  }
  if (r.unitarily_correctable.value && !r.unitarily_recoverable.value) {
    fail("unitarily correctable code is not unitarily recoverable");
  }
}

ClassificationReport classify(const IsometricEncoding& phi, const KrausChannel& e, unsigned horizon,
                              double tol) {
  const double th = 10.0 * tol;
  ClassificationReport rep;
  rep.horizon = horizon;
  rep.tolerance = tol;

  rep.fixed = is_fixed(phi, e, th);
  const Preservation p = is_preserved(phi, e, th);
  rep.preserved = {p.preserved, p.structure.residual};

  if (p.preserved) {
    try {
      const Correction c = build_correction(phi, e, RecoveryStrategy::time_reversal, th);
      rep.correctable = {c.fixed_residual <= th, c.fixed_residual};
      rep.completely_correctable = rep.correctable;
      const ProtectableCode pc = derive_protectable_code(phi, e, th);
      rep.protectable = {pc.protectable, pc.residual};
      const UnitaryCorrectability uc = unitary_correctability(phi, e, th);
      rep.unitarily_correctable = {uc.unitarily_correctable, uc.residual};
      rep.unitarily_recoverable = {uc.unitarily_recoverable, uc.residual};
    } catch (const NotCorrectable& ex) {
      rep.correctable = {false, ex.residual()};
      rep.completely_correctable = rep.correctable;
    }
  } else {
    const double r = p.structure.residual;
    rep.correctable = rep.completely_correctable = rep.protectable = {false, r};
    rep.unitarily_correctable = rep.unitarily_recoverable = {false, r};
  }

  if (e.dim_in() == e.dim_out()) {
    const NoiselessCertificate nc = noiseless_certificate(phi, e, horizon, th);
    rep.noiseless_certificate = {nc.accepted, std::max(nc.power_residual, nc.fixed_residual)};
  }
  check_implications(rep);
  return rep;
}

}  // namespace tniso
