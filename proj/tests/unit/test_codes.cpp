#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tniso/codes.hpp"

using namespace tniso;

TEST(SubsystemDecomposition, Validation) {
  EXPECT_THROW(SubsystemDecomposition(2, 2, 1, ComplexMatrix::Identity(4, 4)), ContractViolation);
  EXPECT_THROW(SubsystemDecomposition(2, 2, 0, ComplexMatrix(2.0 * ComplexMatrix::Identity(4, 4))),
               ContractViolation);
  EXPECT_THROW(SubsystemDecomposition(0, 2, 0, ComplexMatrix::Identity(0, 0)), ContractViolation);
  const auto d = SubsystemDecomposition::standard(2, 3, 1);
  EXPECT_EQ(d.d_p(), 7);
  EXPECT_EQ(d.code_block().cols(), 6);
  EXPECT_EQ(d.remainder_block().cols(), 1);
}

TEST(IsometricEncoding, EncodeMatchesBlockConstruction) {
  Rng rng = stream(1, 0);
  const IsometricEncoding phi = oracle::random_encoding(2, 3, 2, rng);
  const ComplexMatrix rho = random_mixed_state(2, rng).matrix();
  const ComplexMatrix& u = phi.decomposition().basis();
  ComplexMatrix block = ComplexMatrix::Zero(8, 8);
  const ComplexMatrix& tau = phi.cofactor().matrix();
  for (int s = 0; s < 2; ++s) {
    for (int t = 0; t < 2; ++t) {
      for (int f = 0; f < 3; ++f) {
        for (int g = 0; g < 3; ++g) block(s * 3 + f, t * 3 + g) = rho(s, t) * tau(f, g);
      }
    }
  }
  EXPECT_LT(max_abs(ComplexMatrix(encode(phi, rho) - u * block * u.adjoint())), 1e-12);
  EXPECT_LT(max_abs(ComplexMatrix(decode(phi, encode(phi, rho)) - rho)), 1e-12);
  EXPECT_LT(max_abs(ComplexMatrix(phi.superoperator().apply(rho) - encode(phi, rho))), 1e-12);
}

TEST(IsometricEncoding, PreservesTraceDistance) {
  Rng rng = stream(2, 0);
  const IsometricEncoding phi = oracle::random_encoding(3, 2, 1, rng);
  for (int k = 0; k < 10; ++k) {
    const ComplexMatrix a = random_mixed_state(3, rng).matrix();
    const ComplexMatrix b = random_pure_state(3, rng).matrix();
    const double pw = 0.3;
    const ComplexMatrix logical = pw * a - (1 - pw) * b;
    EXPECT_NEAR(oracle::hermitian_trace_norm(encode(phi, logical)), oracle::hermitian_trace_norm(logical),
                1e-12);
  }
}

TEST(IsometricEncoding, WeightsAndMinimalization) {
  Rng rng = stream(3, 0);
  ComplexMatrix tau = ComplexMatrix::Zero(3, 3);
  tau(0, 0) = 0.7;
  tau(1, 1) = 0.3;
  const ComplexMatrix w = haar_unitary(3, rng);
  const IsometricEncoding phi(SubsystemDecomposition(2, 3, 1, haar_unitary(7, rng)),
                              DensityOperator(ComplexMatrix(w * tau * w.adjoint())));
  EXPECT_FALSE(phi.is_minimal());
  const RealVector wts = phi.weights();
  EXPECT_NEAR(wts(0), 0.7, 1e-12);
  EXPECT_NEAR(wts(1), 0.3, 1e-12);
  EXPECT_NEAR(wts(2), 0.0, 1e-12);

  const IsometricEncoding m = phi.minimalize();
  EXPECT_TRUE(m.is_minimal());
  EXPECT_EQ(m.decomposition().d_f(), 2);
  EXPECT_EQ(m.decomposition().d_r(), 3);
  EXPECT_LT(max_abs(m.superoperator() - phi.superoperator()), 1e-12);
}

TEST(IsometricEncoding, RobustSetMember) {
  Rng rng = stream(4, 0);
  const IsometricEncoding phi = oracle::random_encoding(2, 2, 0, rng);
  const DensityOperator other = random_full_rank_state(2, rng);
  const DensityOperator rho = random_pure_state(2, rng);
  const DensityOperator x = encode_with_cofactor(phi, rho, other);
  EXPECT_LT(max_abs(ComplexMatrix(decode(phi, x.matrix()) - rho.matrix())), 1e-12);
}

TEST(Repetition, MajorityBasisMatchesTable) {
  const ComplexMatrix b = majority_basis();
  EXPECT_LT(unitarity_residual(b), 1e-15);
  for (int col = 0; col < 8; ++col) {
    for (int row = 0; row < 8; ++row) {
      EXPECT_EQ(b(row, col), Complex(row == oracle::majority_table(col) ? 1.0 : 0.0)) << row << "," << col;
    }
  }
}

TEST(Repetition, CofactorImageIsSigma) {
  for (double p : {0.0, 0.1, 0.4}) {
    const RepetitionExample ex = make_repetition_example(p);
    Rng rng = stream(5, 0);
    const ComplexMatrix rho = random_mixed_state(2, rng).matrix();
    const ComplexMatrix out = tniso::apply(ex.noise, encode(ex.encoding, rho));
    const ComplexMatrix block = ex.encoding.decomposition().to_block(out);
    const RealVector sigma = oracle::repetition_sigma_spectrum(p);
    ComplexMatrix expected = ComplexMatrix::Zero(8, 8);
    for (int s = 0; s < 2; ++s) {
      for (int t = 0; t < 2; ++t) {
        for (int f = 0; f < 4; ++f) expected(s * 4 + f, t * 4 + f) = rho(s, t) * sigma(f);
      }
    }
    EXPECT_LT(max_abs(ComplexMatrix(block - expected)), 1e-12) << "p=" << p;
    EXPECT_LT(max_abs(ComplexMatrix(ex.sigma.matrix().diagonal().real() - sigma)), 1e-15);
  }
}

TEST(Repetition, RecoveryResetsSyndrome) {
  const RepetitionExample ex = make_repetition_example(0.4);
  Rng rng = stream(6, 0);
  const ComplexMatrix rho = random_mixed_state(2, rng).matrix();
  const ComplexMatrix code = encode(ex.encoding, rho);
  const ComplexMatrix restored = tniso::apply(ex.recovery, tniso::apply(ex.noise, code));
  EXPECT_LT(max_abs(ComplexMatrix(restored - code)), 1e-12);
  EXPECT_THROW(make_repetition_example(0.5), ContractViolation);
}

TEST(Repetition, MixedModelIsConvexCombination) {
  const double p = 0.4;
  const double eps = 0.05;
  const Superoperator s = make_example2_channel(p, eps).superoperator();
  const Superoperator ref = repetition_bit_flip_channel(p).superoperator() * (1 - eps) +
                            repetition_phase_flip_channel(p).superoperator() * eps;
  EXPECT_LT(max_abs(s - ref), 1e-12);
}

TEST(Faithfulness, RepetitionCodePassesAllConditions) {
  const RepetitionExample ex = make_repetition_example(0.4);
  const ObservableEncoding psi(ex.encoding.decomposition());
  const FaithfulnessReport r = verify_faithfulness(ex.encoding, psi, 50, 7);
  EXPECT_EQ(r.samples, 50u);
  EXPECT_LE(r.statics, 1e-9);
  EXPECT_LE(r.unitary_dynamics, 1e-9);
  EXPECT_LE(r.measurement_dynamics, 1e-9);
}

TEST(Faithfulness, RandomEncodingWithRemainderObservable) {
  Rng rng = stream(8, 0);
  const IsometricEncoding phi = oracle::random_encoding(3, 2, 2, rng);
  const ObservableEncoding psi(phi.decomposition(), random_hermitian(2, rng).matrix());
  EXPECT_TRUE(verify_faithfulness(phi, psi, 20, 1).passes(1e-9));
}

TEST(Faithfulness, AdversarialObservableMapFailsStatics) {
  const RepetitionExample ex = make_repetition_example(0.4);
  const ObservableEncoding good(ex.encoding.decomposition());
  const ObservableMap doubled = [&good](const ComplexMatrix& a) {
    return ComplexMatrix(2.0 * encode_observable(good, HermitianOperator(a)).matrix());
  };
  const FaithfulnessReport r = verify_faithfulness(ex.encoding, doubled, 20, 3);
  EXPECT_GT(r.statics, 1e-3);
  EXPECT_FALSE(r.passes(1e-9));
}

TEST(Faithfulness, MismatchedDecompositionRejected) {
  const RepetitionExample ex = make_repetition_example(0.4);
  const ObservableEncoding other(SubsystemDecomposition::standard(2, 4, 0));
  EXPECT_THROW(verify_faithfulness(ex.encoding, other, 5, 0), ContractViolation);
}

TEST(PerturbedEncoding, ValidatesPerturbation) {
  const RepetitionExample ex = make_repetition_example(0.4);
  const Superoperator zero = ex.encoding.superoperator() * 0.0;
  EXPECT_NO_THROW(PerturbedEncoding(ex.encoding, zero, 0.0));
  EXPECT_THROW(PerturbedEncoding(ex.encoding, ex.encoding.superoperator(), 0.1), ContractViolation);
  EXPECT_THROW(PerturbedEncoding(ex.encoding, zero, -1.0), ContractViolation);
  const Superoperator anti = Superoperator::from_map(2, 8, [](const ComplexMatrix& x) {
    ComplexMatrix out = ComplexMatrix::Zero(8, 8);
    out(0, 1) = Complex(0, 1) * x(0, 0);
    return out;
  });
  EXPECT_THROW(PerturbedEncoding(ex.encoding, anti, 0.1), ContractViolation);
}
