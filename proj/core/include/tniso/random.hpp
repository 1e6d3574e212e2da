#pragma once

// Random operators, states and channels for property tests and Monte Carlo
// witnesses. Every sampler takes the engine explicitly; `stream` derives an
// independent engine per sample index so runs are reproducible regardless of
// evaluation order.

#include <cstdint>
#include <random>

#include "tniso/opcore.hpp"

namespace tniso {

class KrausChannel;

using Rng = std::mt19937_64;

Rng stream(std::uint64_t seed, std::uint64_t index);

ComplexMatrix ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng);
ComplexMatrix haar_unitary(Eigen::Index d, Rng& rng);
// d_out x d_in matrix with orthonormal columns, Haar distributed.
ComplexMatrix haar_isometry(Eigen::Index d_out, Eigen::Index d_in, Rng& rng);
ComplexVector haar_pure_vector(Eigen::Index d, Rng& rng);
DensityOperator random_pure_state(Eigen::Index d, Rng& rng);
// Partial trace of a Haar pure state on C^d (x) C^env; env = d gives the
// Hilbert-Schmidt measure.
DensityOperator random_mixed_state(Eigen::Index d, Rng& rng, Eigen::Index env = 0);
// Strictly positive spectrum drawn from a flat Dirichlet, random eigenbasis.
DensityOperator random_full_rank_state(Eigen::Index d, Rng& rng);
HermitianOperator random_hermitian(Eigen::Index d, Rng& rng);

// Stinespring: Haar isometry into C^{d_out} (x) C^{kraus}, environment traced
// out.
KrausChannel random_channel(Eigen::Index d_in, Eigen::Index d_out, Eigen::Index kraus_count,
                            Rng& rng);
// Convex mixture of Haar unitaries.
KrausChannel random_unital_channel(Eigen::Index d, Eigen::Index unitaries, Rng& rng);

}  // namespace tniso
