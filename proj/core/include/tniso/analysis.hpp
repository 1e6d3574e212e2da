#pragma once

// Structure detection for 1-isometric encodings, code classification and
// recovery construction.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tniso/channels.hpp"
#include "tniso/codes.hpp"

namespace tniso {

inline constexpr double kDetectionTolerance = 1e-8;

enum class Conjugation { unitary, anti_unitary, mixed };

const char* to_string(Conjugation c);

// Result of detect_structure. On success the map is
//   rho -> sum_m w_m B_m rho~_m B_m^dag,
// B_m the columns {s*r + m} of the adapted basis and rho~_m = rho or rho^T
// (per weight). When every weight is unitary-type this is U (rho (x) tau (+) 0) U^dag.
struct StructureReport {
  bool found = false;
  // "", "positivity", "orthogonality", "spectrum" or "verification".
  std::string failed_stage;
  // Residual of the last stage that ran; reconstruction error when found.
  double residual = 0.0;
  std::optional<SubsystemDecomposition> decomposition;
  std::optional<DensityOperator> cofactor;
  RealVector weights;
  Conjugation conjugation = Conjugation::unitary;
  std::vector<bool> anti_unitary_weights;
  // Norm deviation of the aligned vectors before orthonormalization.
  double alignment_residual = 0.0;

  // Only for unitary conjugation.
  IsometricEncoding encoding() const;
};

// Apply the detected structure to an operator on H_Q.
ComplexMatrix reconstruct(const StructureReport& s, const ComplexMatrix& rho);

// Never throws on a Hermiticity- and trace-preserving map; `seed` drives the
// randomized verification pass.
StructureReport detect_structure(const Superoperator& phi, double tol = kDetectionTolerance,
                                 std::uint64_t seed = 0);

struct Verdict {
  bool value = false;
  double residual = 0.0;
};

// max over basis elements B of |E(Phi(B)) - Phi(B)|_1.
Verdict is_fixed(const Superoperator& phi, const Superoperator& e, double tol);
Verdict is_fixed(const IsometricEncoding& phi, const KrausChannel& e,
                 double tol = kDetectionTolerance);

struct Preservation {
  bool preserved = false;
  StructureReport structure;
};

Preservation is_preserved(const IsometricEncoding& phi, const KrausChannel& e,
                          double tol = kDetectionTolerance);

struct NoiselessCertificate {
  bool accepted = false;
  unsigned horizon = 0;
  // First power whose image failed detection (0: none failed).
  unsigned failed_power = 0;
  // Max detection residual over E^k o Phi, k = 1..K.
  double power_residual = 0.0;
  // Structure of P_inf o Phi and its fixed residual under E.
  std::optional<StructureReport> fixed_code;
  double fixed_residual = 0.0;
};

NoiselessCertificate noiseless_certificate(const IsometricEncoding& phi, const KrausChannel& e,
                                           unsigned horizon = 8, double tol = kDetectionTolerance);

class NotCorrectable : public std::runtime_error {
 public:
  NotCorrectable(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

enum class RecoveryStrategy { time_reversal, replace };
enum class TimeReversalForm { none, standard, printed };

const char* to_string(RecoveryStrategy s);
const char* to_string(TimeReversalForm f);
// Accepts "time_reversal", "petz" and "replace".
RecoveryStrategy parse_strategy(const std::string& name);

struct Correction {
  KrausChannel recovery;
  RecoveryStrategy strategy_used;
  bool fell_back = false;
  // Form of the cofactor time reversal that validated (none for replace).
  TimeReversalForm form = TimeReversalForm::none;
  // Whether sigma^1/2 E_k^dag tau^-1/2 also validated; empty when the
  // dimensions do not allow it or the strategy is replace.
  std::optional<bool> printed_form_valid;
  double fixed_residual = 0.0;
  StructureReport image;
};

// Throws NotCorrectable when E o Phi is not 1-isometric.
Correction build_correction(const IsometricEncoding& phi, const KrausChannel& e,
                            RecoveryStrategy strategy = RecoveryStrategy::time_reversal,
                            double tol = kDetectionTolerance);

struct ProtectableCode {
  IsometricEncoding code;
  KrausChannel recovery;
  bool protectable = false;
  double residual = 0.0;
};

// C'' = E(C) together with R' such that E o R' fixes C''.
ProtectableCode derive_protectable_code(
    const IsometricEncoding& phi, const KrausChannel& e, double tol = kDetectionTolerance,
    RecoveryStrategy strategy = RecoveryStrategy::time_reversal);

struct UnitaryCorrectability {
  bool unitarily_correctable = false;
  bool unitarily_recoverable = false;
  std::optional<ComplexMatrix> unitary;
  Eigen::Index code_rank = 0;
  Eigen::Index image_rank = 0;
  // Factorization residual of U o E (correctable case) or restoration
  // residual on the code basis (recoverable-only case).
  double residual = 0.0;
};

UnitaryCorrectability unitary_correctability(const IsometricEncoding& phi, const KrausChannel& e,
                                             double tol = kDetectionTolerance);

struct NsOptions {
  // Restrict the input to H_S (x) span{f_0 .. f_{k-1}}; 0 means all of H_F.
  Eigen::Index input_cofactor_dim = 0;
  // Accept V_S (x) F by first removing a common logical unitary.
  bool absorb_logical_unitary = false;
};

struct NsFactorization {
  bool factorizes = false;
  double residual = 0.0;
  std::optional<KrausChannel> cofactor_channel;
  std::optional<ComplexMatrix> logical_unitary;
};

// Throws ContractViolation when E does not map the input block into
// H_S (x) H_F.
NsFactorization check_ns_factorization(const KrausChannel& e, const SubsystemDecomposition& dec,
                                       double tol = kDetectionTolerance,
                                       const NsOptions& opts = {});

struct ClassificationReport {
  Verdict fixed;
  Verdict preserved;
  Verdict noiseless_certificate;
  Verdict correctable;
  Verdict completely_correctable;
  Verdict protectable;
  Verdict unitarily_correctable;
  Verdict unitarily_recoverable;
  unsigned horizon = 0;
  double tolerance = 0.0;
};

// Throws std::logic_error if the implications between verdicts fail.
void check_implications(const ClassificationReport& r);

// Every verdict uses the threshold 10 * tol.
ClassificationReport classify(const IsometricEncoding& phi, const KrausChannel& e,
                              unsigned horizon = 8, double tol = kDetectionTolerance);

}  // namespace tniso
