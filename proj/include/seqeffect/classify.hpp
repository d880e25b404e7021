#pragma once

// Desk-scale replay of the uniqueness argument: build Phi_A(B) = A o B as a
// linear map, classify it among the three pure-positive-map forms, and follow
// the polar-decomposition steps for the conjugation form.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "seqeffect/axioms.hpp"

namespace seqeffect {

/// Linear map on d x d matrices stored as its Choi matrix
///
///   J = sum_{j,k} Phi(e_jk) (x) e_jk,   J(a*d + j, b*d + k) = Phi(e_jk)(a, b).
///
/// The output index is the slow (Kronecker-outer) index, the input index the
/// fast one. A conjugation X -> C* X C has J = x x* with x(a*d + j) = C*(a, j).
class Superoperator {
 public:
  Superoperator(int dim, CMatrix choi);

  /// Evaluates a linear map on the d^2 matrix units.
  static Superoperator from_linear_map(int dim, const std::function<CMatrix(const CMatrix&)>& map);

  int dim() const noexcept { return dim_; }
  const CMatrix& choi() const noexcept { return choi_; }

  /// Phi(e_jk)
  CMatrix image_of_unit(int j, int k) const;
  CMatrix apply(const CMatrix& x) const;

  /// Choi matrix of X -> Phi(X^T), a partial transpose on the input factor.
  CMatrix choi_of_transpose_composition() const;

  /// max_{j,k} ||Phi(e_jk) - Psi(e_jk)||
  double distance(const Superoperator& other) const;

 private:
  int dim_;
  CMatrix choi_;
};

/// Linear extension of B -> prod(A, B) from the d^2 projection probes e_jj and
/// |e_j + e_k><e_j + e_k| / 2, |e_j + i e_k><e_j + i e_k| / 2. Throws NotAffine
/// when the extension fails to reproduce prod(A, .) on 0, I and a few fixed
/// random effects.
Superoperator superoperator_from_product(const CandidateProduct& prod, const Effect& a,
                                         const ToleranceConfig& tol = {});

enum class PureMapForm { Conjugation, AntiConjugation, RankOneOutput, Unclassified };

const char* to_string(PureMapForm form) noexcept;

struct PureMapClassification {
  PureMapForm form = PureMapForm::Unclassified;
  std::optional<CMatrix> c;       // Phi(X) = C* X C or C* X^T C
  std::optional<CMatrix> b_op;    // Phi(X) = Tr(X B) |psi><psi|
  std::optional<CVector> psi;
  double residual = 0.0;          // reconstruction error on matrix units
  std::string note;
};

PureMapClassification classify_pure_positive(const Superoperator& s, const ToleranceConfig& tol = {});

struct ProofStep {
  std::string name;
  double residual = 0.0;
  bool passed = false;
};

struct ProofTraceReport {
  std::string candidate;
  CMatrix a;
  PureMapForm form = PureMapForm::Unclassified;
  std::vector<ProofStep> steps;
  std::optional<CMatrix> c;
  std::optional<CMatrix> isometry;   // U in C = U A^{1/2}
  std::optional<CMatrix> sqrt_a;
  std::optional<Complex> mu;         // U^2 = mu I

  bool all_passed() const;
  /// First failing step, if any.
  const ProofStep* first_failure() const;
};

inline constexpr std::size_t kTraceProbeCount = 8;
inline constexpr std::size_t kTraceFinalProbeCount = 100;

/// Requires lambda_min(A) > 10 psd_tol (NotInvertible otherwise). Throws
/// UnclassifiedMap when Phi_A fits none of the three forms.
ProofTraceReport trace_theorem_steps(const CandidateProduct& prod, const Effect& a,
                                     const ToleranceConfig& tol = {}, std::uint64_t probe_seed = 0);

/// (1 + 1/i)^{-1} (A + I/i)
Effect regularize_invertible(const Effect& a, int i);

}  // namespace seqeffect
