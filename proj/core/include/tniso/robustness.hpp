#pragma once

// Approximately isometric encodings: perturbation size, iterated
// noise-plus-recovery simulation and the linear / geometric error bounds.

#include <cstdint>
#include <optional>
#include <vector>

#include "tniso/channels.hpp"
#include "tniso/codes.hpp"

namespace tniso {

struct EpsilonMethod {
  std::size_t samples = 0;
  std::size_t refine_steps = 0;
  std::uint64_t seed = 0;
};

// [epsilon, upper_bound] brackets max over states of |(Phi~ - Phi)(rho)|_1.
// epsilon is attained at `witness`; upper_bound is the largest eigenvalue of
// N_ij = |Delta(|i><j|)|_1 (symmetrized), valid because |rho_ij| <= sqrt(rho_ii rho_jj).
struct EpsilonEstimate {
  double epsilon = 0.0;
  double upper_bound = 0.0;
  DensityOperator witness;
  EpsilonMethod method;
};

double induced_norm_bound(const Superoperator& delta);

EpsilonEstimate estimate_epsilon(const Superoperator& perturbed, const Superoperator& nominal,
                                 std::size_t samples = 2000, std::size_t refine_steps = 200,
                                 std::uint64_t seed = 0);
EpsilonEstimate estimate_epsilon(const Superoperator& perturbed, const IsometricEncoding& nominal,
                                 std::size_t samples = 2000, std::size_t refine_steps = 200,
                                 std::uint64_t seed = 0);

struct SimulationOptions {
  // Certified per-round perturbation; fills linear_bound and geometric_bound.
  double epsilon = 0.0;
  // When set, logical states are decoded and their errors recorded.
  std::optional<SubsystemDecomposition> decoding;
  bool keep_states = true;
};

struct SimulationTrace {
  std::size_t iterations = 0;
  double epsilon = 0.0;
  std::vector<ComplexMatrix> states;  // rho_0 .. rho_n (empty unless kept)
  std::vector<double> errors;         // |rho_0 - rho_i|_1
  std::vector<ComplexMatrix> decoded_states;
  std::vector<double> decoded_errors;
  std::vector<double> linear_bound;  // i * epsilon
  // |r_{i+1}|_1 / |r_i|_1 with r = rho - P_inf(rho), P_inf the Cesaro
  // projector of R o E; steps with |r_i|_1 < 1e-9 are skipped.
  std::vector<double> alpha_estimates;
  std::optional<double> alpha_max;
  std::optional<double> geometric_bound;
};

SimulationTrace simulate_iterated(const KrausChannel& e, const KrausChannel& r,
                                  const DensityOperator& rho0, std::size_t n,
                                  const SimulationOptions& opts = {});

struct LinearBoundCheck {
  bool holds = false;
  double margin = 0.0;  // min over n >= 1 of (n eps - e_n)
};

// e_n <= n eps + 1e-6 for every n in the trace.
LinearBoundCheck check_prop3_bound(const SimulationTrace& trace, double epsilon);

struct GeometricBoundCheck {
  bool applicable = false;
  bool holds = false;
  double alpha_max = 0.0;
  double bound = 0.0;
};

// e_n <= eps / (1 - alpha_max) + 1e-6; not applicable without alpha_max < 1.
GeometricBoundCheck check_geometric_bound(const SimulationTrace& trace, double epsilon);

struct NonAmplification {
  bool holds = false;
  bool monotone = false;
  double max_error = 0.0;
  std::vector<double> round_errors;  // max over test states, k = 0..n
};

// Throws ContractViolation unless R o E fixes the nominal encoding.
NonAmplification perturbed_encoding_correctability(const PerturbedEncoding& phi_tilde,
                                                   const KrausChannel& e, const KrausChannel& r,
                                                   std::size_t n, double tol = 1e-8,
                                                   std::size_t samples = 20, std::uint64_t seed = 0);

}  // namespace tniso
