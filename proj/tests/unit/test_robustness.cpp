#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tniso/analysis.hpp"
#include "tniso/robustness.hpp"

using namespace tniso;

namespace {

ComplexMatrix plus() { return ComplexMatrix::Constant(2, 2, Complex(0.5, 0.0)); }

// Phi~(rho) = Phi(rho) + delta * <Z>_rho * (|a><a| - |b><b|) / 2 for two
// orthogonal physical vectors a, b: the perturbation's induced norm is delta.
Superoperator injected(const IsometricEncoding& phi, double delta) {
  const Eigen::Index dp = phi.physical_dim();
  const ComplexMatrix w = 0.5 * (matrix_unit(dp, 0, 0) - matrix_unit(dp, 1, 1));
  return phi.superoperator() + Superoperator::from_map(2, dp, [&](const ComplexMatrix& x) {
           return ComplexMatrix(delta * (x(0, 0) - x(1, 1)) * w);
         });
}

}  // namespace

TEST(Epsilon, ZeroForExactEncoding) {
  Rng rng = stream(200, 0);
  const IsometricEncoding phi = oracle::random_encoding(2, 2, 1, rng);
  const EpsilonEstimate e = estimate_epsilon(phi.superoperator(), phi, 50, 10, 0);
  EXPECT_EQ(e.epsilon, 0.0);
  EXPECT_EQ(e.upper_bound, 0.0);
}

TEST(Epsilon, InjectedPerturbationMatchesGridOracle) {
  Rng rng = stream(201, 0);
  const IsometricEncoding phi = oracle::random_encoding(2, 2, 0, rng);
  const Superoperator tilde = injected(phi, 0.01);
  const Superoperator delta = tilde - phi.superoperator();
  const double grid = oracle::qubit_grid_max(
      [&](const ComplexMatrix& r) { return oracle::hermitian_trace_norm(delta.apply(r)); });
  const EpsilonEstimate e = estimate_epsilon(tilde, phi);
  EXPECT_GE(e.epsilon, 0.009);
  EXPECT_LE(e.epsilon, 0.011);
  EXPECT_NEAR(e.epsilon, grid, 1e-3);
  EXPECT_GE(e.upper_bound, e.epsilon);
  EXPECT_NEAR(oracle::hermitian_trace_norm(delta.apply(e.witness.matrix())), e.epsilon, 1e-12);
}

TEST(Epsilon, MixedFlipRoundMatchesGridOracle) {
  const double p = 0.4;
  const double eps = 0.05;
  const RepetitionExample ex = make_repetition_example(p);
  const Superoperator round =
      compose(ex.recovery, make_example2_channel(p, eps)).superoperator().after(ex.encoding.superoperator());
  // On the code the round acts as rho -> (1 - eps p) rho + eps p Z rho Z.
  const double grid = oracle::qubit_grid_max([&](const ComplexMatrix& r) {
    const ComplexMatrix z = oracle::z_gate();
    return eps * p * oracle::hermitian_trace_norm(ComplexMatrix(z * r * z - r));
  });
  EXPECT_NEAR(grid, 2 * eps * p, 1e-3);
  const EpsilonEstimate e = estimate_epsilon(round, ex.encoding);
  EXPECT_NEAR(e.epsilon, grid, 0.05 * grid);
  EXPECT_NEAR(e.upper_bound, 2 * eps * p, 1e-9);
}

TEST(Epsilon, DeterministicForSeed) {
  Rng rng = stream(202, 0);
  const IsometricEncoding phi = oracle::random_encoding(2, 1, 1, rng);
  const Superoperator tilde = injected(phi, 0.02);
  const EpsilonEstimate a = estimate_epsilon(tilde, phi, 100, 20, 9);
  const EpsilonEstimate b = estimate_epsilon(tilde, phi, 100, 20, 9);
  EXPECT_EQ(a.epsilon, b.epsilon);
  EXPECT_EQ(a.method.seed, 9u);
}

TEST(Simulation, ExactRecoveryHasZeroError) {
  const RepetitionExample ex = make_repetition_example(0.4);
  const DensityOperator rho0 = encode(ex.encoding, DensityOperator(plus()));
  const SimulationTrace t = simulate_iterated(ex.noise, ex.recovery, rho0, 20);
  ASSERT_EQ(t.errors.size(), 21u);
  for (double e : t.errors) EXPECT_LT(e, 1e-12);
}

TEST(Simulation, MixedFlipCoherenceDecay) {
  const double p = 0.4;
  const double eps = 0.05;
  const RepetitionExample ex = make_repetition_example(p);
  const DensityOperator rho0 = encode(ex.encoding, DensityOperator(plus()));
  SimulationOptions opts;
  opts.epsilon = 2 * eps * p;
  opts.decoding = ex.encoding.decomposition();
  const SimulationTrace t = simulate_iterated(make_example2_channel(p, eps), ex.recovery, rho0, 10, opts);
  for (int n = 0; n <= 10; ++n) {
    const double off = oracle::example2_offdiag(p, eps, n);
    EXPECT_NEAR(t.decoded_states[n](0, 1).real(), off, 1e-12);
    EXPECT_NEAR(t.decoded_states[n](0, 0).real(), 0.5, 1e-12);
    EXPECT_NEAR(t.decoded_errors[n], 1.0 - 2.0 * off, 1e-12);
  }
  EXPECT_NEAR(t.decoded_states[10](0, 1).real(), 0.332416, 1e-6);
  EXPECT_NEAR(t.errors[10], 0.335167, 1e-6);
  ASSERT_TRUE(t.alpha_max.has_value());
  EXPECT_NEAR(*t.alpha_max, 0.96, 1e-9);
  EXPECT_NEAR(*t.geometric_bound, 1.0, 1e-9);
  EXPECT_TRUE(check_prop3_bound(t, opts.epsilon).holds);
  EXPECT_TRUE(check_geometric_bound(t, opts.epsilon).holds);
}

TEST(Simulation, LongRunReachesMaximallyMixed) {
  const RepetitionExample ex = make_repetition_example(0.4);
  const DensityOperator rho0 = encode(ex.encoding, DensityOperator(plus()));
  SimulationOptions opts;
  opts.epsilon = 0.04;
  opts.decoding = ex.encoding.decomposition();
  opts.keep_states = false;
  const SimulationTrace t = simulate_iterated(make_example2_channel(0.4, 0.05), ex.recovery, rho0, 500, opts);
  EXPECT_TRUE(t.states.empty());
  EXPECT_NEAR(t.errors.back(), 1.0, 1e-6);
  EXPECT_LT(max_abs(ComplexMatrix(t.decoded_states.back() - 0.5 * ComplexMatrix::Identity(2, 2))), 1e-6);
  EXPECT_TRUE(check_geometric_bound(t, 0.04).holds);
}

TEST(LinearBound, HoldsForRandomPerturbations) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    Rng rng = stream(203, s);
    const auto inst = oracle::random_preserved(2, 2, 1, 2, rng);
    const Correction c = build_correction(inst.phi, inst.channel);
    const double w[] = {0.9, 0.1};
    const KrausChannel cs[] = {inst.channel, random_channel(5, 5, 2, rng)};
    const KrausChannel noisy = convex_mix(w, cs);
    const Superoperator round =
        compose(c.recovery, noisy).superoperator().after(inst.phi.superoperator());
    const EpsilonEstimate est = estimate_epsilon(round, inst.phi, 200, 50, s);
    SimulationOptions opts;
    opts.epsilon = est.upper_bound;
    const DensityOperator rho0 = encode(inst.phi, random_pure_state(2, rng));
    const SimulationTrace t = simulate_iterated(noisy, c.recovery, rho0, 15, opts);
    EXPECT_TRUE(check_prop3_bound(t, est.upper_bound).holds) << "seed " << s;
  }
}

TEST(LinearBound, NegativeControlFlagsUnderstatedEpsilon) {
  const RepetitionExample ex = make_repetition_example(0.4);
  const DensityOperator rho0 = encode(ex.encoding, DensityOperator(plus()));
  const SimulationTrace t = simulate_iterated(make_example2_channel(0.4, 0.05), ex.recovery, rho0, 10);
  const LinearBoundCheck c = check_prop3_bound(t, 0.001);
  EXPECT_FALSE(c.holds);
  EXPECT_LT(c.margin, 0.0);
  const LinearBoundCheck ok = check_prop3_bound(t, 0.04);
  EXPECT_TRUE(ok.holds);
  EXPECT_GE(ok.margin, -1e-12);
}

TEST(GeometricBound, ConstructedContraction) {
  // T = 1/2 id + 1/2 (rho -> I/2) contracts deviations from I/2 by exactly 1/2.
  const double w[] = {0.5, 0.5};
  const KrausChannel cs[] = {KrausChannel::identity(2),
                             KrausChannel::replacement(2, DensityOperator::maximally_mixed(2))};
  const KrausChannel t_chan = convex_mix(w, cs);
  ComplexMatrix rho0 = ComplexMatrix::Zero(2, 2);
  rho0(0, 0) = 0.51;
  rho0(1, 1) = 0.49;
  SimulationOptions opts;
  opts.epsilon = 0.01;
  const SimulationTrace t = simulate_iterated(t_chan, KrausChannel::identity(2), DensityOperator(rho0), 12, opts);
  ASSERT_TRUE(t.alpha_max.has_value());
  EXPECT_NEAR(*t.alpha_max, 0.5, 1e-9);
  const GeometricBoundCheck g = check_geometric_bound(t, 0.01);
  EXPECT_TRUE(g.applicable);
  EXPECT_NEAR(g.bound, 0.02, 1e-9);
  EXPECT_TRUE(g.holds);
  EXPECT_NEAR(t.errors.back(), 0.02 * (1.0 - std::pow(0.5, 12)), 1e-12);
}

TEST(GeometricBound, NotApplicableWithoutContraction) {
  const RepetitionExample ex = make_repetition_example(0.4);
  const DensityOperator rho0 = encode(ex.encoding, DensityOperator(plus()));
  const SimulationTrace t = simulate_iterated(ex.noise, ex.recovery, rho0, 5);
  EXPECT_FALSE(check_geometric_bound(t, 0.0).applicable);
}

TEST(NonAmplification, PerturbedInputStaysWithinEpsilon) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const RepetitionExample ex = make_repetition_example(0.3);
    Rng rng = stream(204, s);
    const double delta = 0.01 * static_cast<double>(s + 1);
    const Superoperator d = injected(ex.encoding, delta) - ex.encoding.superoperator();
    const PerturbedEncoding pe(ex.encoding, d, delta);
    const NonAmplification na = perturbed_encoding_correctability(pe, ex.noise, ex.recovery, 10, 1e-8, 20, s);
    EXPECT_TRUE(na.holds) << "seed " << s;
    EXPECT_TRUE(na.monotone);
    EXPECT_LE(na.max_error, delta + 1e-9);
    ASSERT_EQ(na.round_errors.size(), 11u);
  }
}

TEST(NonAmplification, RequiresAFixingRecovery) {
  const RepetitionExample ex = make_repetition_example(0.3);
  const PerturbedEncoding pe(ex.encoding, ex.encoding.superoperator() * 0.0, 0.0);
  EXPECT_THROW(perturbed_encoding_correctability(pe, ex.noise, KrausChannel::identity(8), 3),
               ContractViolation);
}
