#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tniso/channels.hpp"

using namespace tniso;

TEST(Vectorization, ColumnStackingConvention) {
  Rng rng = stream(1, 0);
  const ComplexMatrix a = ginibre(3, 2, rng);
  const ComplexMatrix x = ginibre(2, 4, rng);
  const ComplexMatrix b = ginibre(4, 3, rng);
  const ComplexVector lhs = vec(a * x * b);
  const ComplexVector rhs = kron(ComplexMatrix(b.transpose()), a) * vec(x);
  EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(vec(matrix_unit(3, 1, 2))(1 + 2 * 3), Complex(1.0));
  EXPECT_LT(max_abs(ComplexMatrix(unvec(vec(x), 2, 4) - x)), 0.0 + 1e-300);
}

TEST(Superoperator, MatchesNaiveKrausSum) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    Rng rng = stream(2, s);
    const KrausChannel e = random_channel(3, 2, 3, rng);
    const ComplexMatrix x = ginibre(3, 3, rng);
    const ComplexMatrix ref = oracle::naive_apply(oracle::kraus_of(e), x);
    EXPECT_LT(max_abs(ComplexMatrix(e.superoperator().apply(x) - ref)), 1e-12);
    EXPECT_LT(max_abs(ComplexMatrix(tniso::apply(e, x) - ref)), 1e-12);
    EXPECT_LT(max_abs(ComplexMatrix(e.superoperator().image_of_unit(2, 0) -
                                    oracle::naive_apply(oracle::kraus_of(e), matrix_unit(3, 2, 0)))),
              1e-12);
  }
}

TEST(Superoperator, TransposeMap) {
  Rng rng = stream(3, 0);
  const ComplexMatrix x = ginibre(3, 3, rng);
  EXPECT_LT(max_abs(ComplexMatrix(Superoperator::transpose(3).apply(x) - x.transpose())), 1e-15);
}

TEST(Superoperator, AlgebraAndPowers) {
  Rng rng = stream(4, 0);
  const KrausChannel e = random_channel(2, 2, 2, rng);
  const Superoperator s = e.superoperator();
  const Superoperator s3 = s.power(3);
  const ComplexMatrix x = random_mixed_state(2, rng).matrix();
  EXPECT_LT(max_abs(ComplexMatrix(s3.apply(x) - tniso::apply(e, tniso::apply(e, tniso::apply(e, x))))), 1e-12);
  EXPECT_LT(max_abs(s.power(0) - Superoperator::identity(2)), 1e-15);
  EXPECT_LT(max_abs((s + s) - s * 2.0), 1e-15);
  EXPECT_THROW(s.after(Superoperator::identity(3)), ContractViolation);
}

TEST(KrausChannel, Validation) {
  EXPECT_THROW(KrausChannel(std::vector<ComplexMatrix>{}), ContractViolation);
  EXPECT_THROW(KrausChannel({ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(3, 3)}),
               ContractViolation);
  EXPECT_THROW(KrausChannel({ComplexMatrix(1.1 * ComplexMatrix::Identity(2, 2))}), ContractViolation);
  const KrausChannel id = KrausChannel::identity(3);
  EXPECT_EQ(id.tp_residual(), 0.0);
}

TEST(KrausChannel, ReplacementAndPrune) {
  Rng rng = stream(5, 0);
  const DensityOperator target = random_mixed_state(3, rng);
  const KrausChannel r = KrausChannel::replacement(2, target);
  const ComplexMatrix x = random_pure_state(2, rng).matrix();
  EXPECT_LT(max_abs(ComplexMatrix(tniso::apply(r, x) - target.matrix())), 1e-12);

  const KrausChannel padded({ComplexMatrix::Identity(2, 2), ComplexMatrix::Zero(2, 2)});
  EXPECT_EQ(padded.prune(1e-12).kraus_count(), 1u);
}

TEST(Composition, ComposeAndMix) {
  Rng rng = stream(6, 0);
  const KrausChannel a = random_channel(2, 3, 2, rng);
  const KrausChannel b = random_channel(3, 2, 2, rng);
  const KrausChannel ba = compose(b, a);
  EXPECT_LT(max_abs(ba.superoperator() - b.superoperator().after(a.superoperator())), 1e-12);

  const KrausChannel u = KrausChannel::unitary(haar_unitary(2, rng));
  const double w[] = {0.25, 0.75};
  const KrausChannel cs[] = {u, ba};
  const KrausChannel mix = convex_mix(w, cs);
  EXPECT_LT(max_abs(mix.superoperator() - (u.superoperator() * 0.25 + ba.superoperator() * 0.75)), 1e-12);
  const double bad[] = {0.5, 0.6};
  EXPECT_THROW(convex_mix(bad, cs), ContractViolation);

  const double pw[] = {0.5, 0.25, 0.25};
  const Superoperator pm = power_mix(ba, pw);
  const Superoperator s = ba.superoperator();
  EXPECT_LT(max_abs(pm - (Superoperator::identity(2) * 0.5 + s * 0.25 + s.power(2) * 0.25)), 1e-12);
}

TEST(StandardChannels, DepolarizingAndFlips) {
  Rng rng = stream(7, 0);
  const ComplexMatrix rho = random_mixed_state(3, rng).matrix();
  const ComplexMatrix out = tniso::apply(completely_depolarizing_channel(3), rho);
  EXPECT_LT(max_abs(ComplexMatrix(out - ComplexMatrix::Identity(3, 3) / 3.0)), 1e-12);

  const ComplexMatrix q = random_mixed_state(2, rng).matrix();
  const ComplexMatrix bf = tniso::apply(bit_flip_channel(0.3), q);
  const ComplexMatrix x = oracle::x_gate();
  EXPECT_LT(max_abs(ComplexMatrix(bf - (0.7 * q + 0.3 * x * q * x))), 1e-12);
  const ComplexMatrix pf = tniso::apply(phase_flip_channel(0.3), q);
  const ComplexMatrix z = oracle::z_gate();
  EXPECT_LT(max_abs(ComplexMatrix(pf - (0.7 * q + 0.3 * z * q * z))), 1e-12);
  EXPECT_LT(depolarizing_channel(4, 0.2).tp_residual(), 1e-12);
}

TEST(Cesaro, BitFlipTwirlBothMethods) {
  const KrausChannel bf = bit_flip_channel(0.3);
  Rng rng = stream(8, 0);
  for (auto method : {CesaroMethod::spectral, CesaroMethod::iterative}) {
    const Superoperator p = cesaro_projector(bf, {.method = method});
    for (int k = 0; k < 5; ++k) {
      const ComplexMatrix rho = random_mixed_state(2, rng).matrix();
      EXPECT_LT(max_abs(ComplexMatrix(p.apply(rho) - oracle::bit_flip_twirl(rho))), 1e-10);
    }
  }
}

TEST(Cesaro, FixedPointsMatchKernelOracle) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    Rng rng = stream(9, s);
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(s % 3);
    const KrausChannel e = s % 2 == 0 ? random_unital_channel(d, 2, rng) : random_channel(d, d, 2, rng);
    const Superoperator p = cesaro_projector(e);
    const ComplexMatrix kernel = oracle::fixed_point_kernel(e.superoperator().matrix());
    ASSERT_GT(kernel.cols(), 0);
    EXPECT_LT((p.matrix() * kernel - kernel).cwiseAbs().maxCoeff(), 1e-8);
    Eigen::FullPivLU<ComplexMatrix> lu(p.matrix());
    lu.setThreshold(1e-8);
    EXPECT_EQ(lu.rank(), kernel.cols());
  }
}

TEST(Cesaro, ProjectorIdentitiesOnRandomChannels) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    Rng rng = stream(10, s);
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(s % 4);
    const KrausChannel e = random_channel(d, d, 1 + static_cast<Eigen::Index>(s % 3), rng);
    const Superoperator p = cesaro_projector(e);
    EXPECT_LT(max_abs(e.superoperator().after(p) - p), 1e-8);
    EXPECT_LT(max_abs(p.after(p) - p), 1e-8);
  }
}

TEST(Cesaro, IterativeReportsNonConvergence) {
  const KrausChannel slow = bit_flip_channel(1e-6);
  try {
    cesaro_projector(slow, {.method = CesaroMethod::iterative, .max_n = 16});
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.residual(), 1e-10);
  }
}

TEST(Cesaro, IdentityChannelIsItsOwnProjector) {
  const Superoperator p = cesaro_projector(KrausChannel::identity(3));
  EXPECT_LT(max_abs(p - Superoperator::identity(3)), 1e-12);
}

TEST(SupportInvariance, DetectsLeaks) {
  const DensityOperator zero(matrix_unit(2, 0, 0));
  EXPECT_TRUE(check_support_invariance(KrausChannel::identity(2), zero, 1e-12).invariant);
  const SupportInvariance leak = check_support_invariance(bit_flip_channel(0.25), zero, 1e-12);
  EXPECT_FALSE(leak.invariant);
  EXPECT_NEAR(leak.residual, 0.5, 1e-12);
  EXPECT_TRUE(check_support_invariance(phase_flip_channel(0.25), zero, 1e-12).invariant);
}

TEST(Contraction, RatioNeverExceedsOne) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    Rng rng = stream(11, s);
    const KrausChannel e = random_channel(3, 2, 2, rng);
    EXPECT_LE(contraction_witness(e, 20, s), 1.0 + 1e-9);
  }
  Rng rng = stream(12, 0);
  EXPECT_NEAR(contraction_witness(KrausChannel::unitary(haar_unitary(3, rng)), 10, 0), 1.0, 1e-12);
}
