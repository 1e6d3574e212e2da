#include "tniso/robustness.hpp"

#include <algorithm>
#include <cmath>

#include "tniso/analysis.hpp"
#include "tniso/random.hpp"

namespace tniso {

namespace {
// Below this the ratio of successive residuals is dominated by rounding.
constexpr double kAlphaFloor = 1e-9;
}  // namespace

double induced_norm_bound(const Superoperator& delta) {
  const Eigen::Index d = delta.dim_in();
  Eigen::MatrixXd n(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) n(i, j) = trace_norm(delta.image_of_unit(i, j));
  }
  const Eigen::MatrixXd sym = 0.5 * (n + n.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  return std::max(es.eigenvalues().maxCoeff(), 0.0);
}

EpsilonEstimate estimate_epsilon(const Superoperator& perturbed, const Superoperator& nominal,
                                 std::size_t samples, std::size_t refine_steps, std::uint64_t seed) {
  if (perturbed.dim_in() != nominal.dim_in() || perturbed.dim_out() != nominal.dim_out()) {
    throw ContractViolation("estimate_epsilon: dimension mismatch");
  }
  const Superoperator delta = perturbed - nominal;
  const Eigen::Index d = delta.dim_in();
  auto value = [&delta](const ComplexVector& psi) {
    return trace_norm(delta.apply(ComplexMatrix(psi * psi.adjoint())));
  };

  ComplexVector best = ComplexVector::Zero(d);
  best(0) = 1.0;
  double best_val = -1.0;
  for (std::size_t i = 0; i < std::max<std::size_t>(samples, 1); ++i) {
    Rng rng = stream(seed, i);
    const ComplexVector psi = haar_pure_vector(d, rng);
    const double v = value(psi);
    if (v > best_val) {
      best_val = v;
      best = psi;
    }
  }

  // Accept-improve local search around the best sample.
  double step = 0.1;
  Rng rng = stream(seed, samples + 1);
  for (std::size_t k = 0; k < refine_steps; ++k) {
    ComplexVector cand = best + step * ComplexVector(ginibre(d, 1, rng).col(0));
    const double nrm = cand.norm();
    if (nrm == 0.0) continue;
    cand /= nrm;
    const double v = value(cand);
    if (v > best_val) {
      best_val = v;
      best = cand;
    } else {
      step = std::max(0.9 * step, 1e-6);
    }
  }

  DensityOperator witness = DensityOperator::pure(best);
  const double eps = trace_norm(delta.apply(witness.matrix()));
  return {eps, std::max(induced_norm_bound(delta), eps), std::move(witness),
          {samples, refine_steps, seed}};
}

EpsilonEstimate estimate_epsilon(const Superoperator& perturbed, const IsometricEncoding& nominal,
                                 std::size_t samples, std::size_t refine_steps, std::uint64_t seed) {
  return estimate_epsilon(perturbed, nominal.superoperator(), samples, refine_steps, seed);
}

SimulationTrace simulate_iterated(const KrausChannel& e, const KrausChannel& r,
                                  const DensityOperator& rho0, std::size_t n,
                                  const SimulationOptions& opts) {
  if (n < 1) throw ContractViolation("simulate_iterated: need at least one iteration");
  if (e.dim_out() != r.dim_in() || r.dim_out() != e.dim_in() || rho0.dim() != e.dim_in()) {
    throw ContractViolation("simulate_iterated: dimension mismatch");
  }
  if (opts.decoding && opts.decoding->d_p() != rho0.dim()) {
    throw ContractViolation("simulate_iterated: decoding dimension mismatch");
  }
  const Superoperator step = compose(r, e).superoperator();
  const Superoperator p_inf = cesaro_projector(step);

  SimulationTrace t;
  t.iterations = n;
  t.epsilon = opts.epsilon;
  const ComplexMatrix start = rho0.matrix();
  ComplexMatrix decoded0;
  if (opts.decoding) decoded0 = decode(*opts.decoding, start);

  ComplexMatrix rho = start;
  double prev_res = trace_norm(ComplexMatrix(rho - p_inf.apply(rho)));
  for (std::size_t i = 0; i <= n; ++i) {
    if (i > 0) {
      rho = step.apply(rho);
      const double res = trace_norm(ComplexMatrix(rho - p_inf.apply(rho)));
      if (prev_res >= kAlphaFloor) t.alpha_estimates.push_back(res / prev_res);
      prev_res = res;
    }
    if (opts.keep_states) t.states.push_back(rho);
    t.errors.push_back(i == 0 ? 0.0 : trace_norm(ComplexMatrix(start - rho)));
    if (opts.decoding) {
      const ComplexMatrix dec = decode(*opts.decoding, rho);
      t.decoded_errors.push_back(i == 0 ? 0.0 : trace_norm(ComplexMatrix(decoded0 - dec)));
      t.decoded_states.push_back(dec);
    }
    t.linear_bound.push_back(static_cast<double>(i) * opts.epsilon);
  }
  if (!t.alpha_estimates.empty()) {
    t.alpha_max = *std::max_element(t.alpha_estimates.begin(), t.alpha_estimates.end());
    if (*t.alpha_max < 1.0) t.geometric_bound = opts.epsilon / (1.0 - *t.alpha_max);
  }
  return t;
}

LinearBoundCheck check_prop3_bound(const SimulationTrace& trace, double epsilon) {
  LinearBoundCheck c{true, 0.0};
  bool first = true;
  for (std::size_t i = 0; i < trace.errors.size(); ++i) {
    const double slack = static_cast<double>(i) * epsilon - trace.errors[i];
    if (slack < -1e-6) c.holds = false;
    if (i == 0 && trace.errors.size() > 1) continue;
    if (first || slack < c.margin) c.margin = slack;
    first = false;
  }
  return c;
}

GeometricBoundCheck check_geometric_bound(const SimulationTrace& trace, double epsilon) {
  GeometricBoundCheck c;
  if (!trace.alpha_max || *trace.alpha_max >= 1.0) return c;
  c.applicable = true;
  c.alpha_max = *trace.alpha_max;
  c.bound = epsilon / (1.0 - c.alpha_max);
  c.holds = std::all_of(trace.errors.begin(), trace.errors.end(),
                        [&c](double e) { return e <= c.bound + 1e-6; });
  return c;
}

NonAmplification perturbed_encoding_correctability(const PerturbedEncoding& phi_tilde,
                                                   const KrausChannel& e, const KrausChannel& r,
                                                   std::size_t n, double tol, std::size_t samples,
                                                   std::uint64_t seed) {
  const IsometricEncoding& nominal = phi_tilde.nominal();
  const KrausChannel re = compose(r, e);
  const Verdict fixed = is_fixed(nominal, re, 1e-8);
  if (!fixed.value) {
    throw ContractViolation("perturbed_encoding_correctability: R o E does not fix the nominal code");
  }
  const Superoperator step = re.superoperator();
  const Eigen::Index d = nominal.logical_dim();

  std::vector<ComplexMatrix> tests;
  for (Eigen::Index i = 0; i < d; ++i) tests.push_back(matrix_unit(d, i, i));
  for (std::size_t k = 0; k < samples; ++k) {
    Rng rng = stream(seed, k);
    tests.push_back(k % 2 == 0 ? random_pure_state(d, rng).matrix() : random_mixed_state(d, rng).matrix());
  }

  NonAmplification out;
  out.monotone = true;
  out.round_errors.assign(n + 1, 0.0);
  for (const auto& rho : tests) {
    const ComplexMatrix target = encode(nominal, rho);
    ComplexMatrix x = phi_tilde.apply(rho);
    double prev = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
      if (k > 0) x = step.apply(x);
      const double err = trace_norm(ComplexMatrix(x - target));
      if (k > 0 && err > prev + 1e-10) out.monotone = false;
      prev = err;
      out.round_errors[k] = std::max(out.round_errors[k], err);
    }
  }
  out.max_error = *std::max_element(out.round_errors.begin(), out.round_errors.end());
  out.holds = out.monotone && out.max_error <= phi_tilde.epsilon() + tol;
  return out;
}

}  // namespace tniso
