#pragma once

// Numerical checks of the sequential-product conditions for arbitrary
// candidate products, plus a fuzzer that collects violation witnesses.
//
// Every checker draws trial t from its own SplitMix64 stream seeded with
// derive_seed(seed, stream(condition, dim), t), so reports depend only on
// (candidate, dim, trials, seed, tolerances).

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "seqeffect/effects.hpp"
#include "seqeffect/random.hpp"

namespace seqeffect {

enum class ConditionId {
  Closure,
  Duality,
  Unit,
  WeakAssoc,
  Continuity,
  Purity,
  Affinity,
  HalfDuality,
  HalfAssoc,
  CommutingProduct,
};

inline constexpr ConditionId kAllConditions[] = {
    ConditionId::Closure,    ConditionId::Duality,  ConditionId::Unit,
    ConditionId::WeakAssoc,  ConditionId::Continuity, ConditionId::Purity,
    ConditionId::Affinity,   ConditionId::HalfDuality, ConditionId::HalfAssoc,
    ConditionId::CommutingProduct,
};

/// Wire names: CLOSURE, DUALITY, UNIT, WEAK_ASSOC, ...
const char* to_string(ConditionId id) noexcept;
std::optional<ConditionId> condition_from_string(const std::string& name);

/// Duality, unit, weak associativity, continuity and purity.
bool is_defining_condition(ConditionId id) noexcept;

/// Threshold a residual is compared against: psd_tol for closure, rank_tol for
/// purity, eq_tol otherwise.
double condition_tolerance(ConditionId id, const ToleranceConfig& tol) noexcept;

/// A binary operation on effects submitted for checking. Outputs are raw
/// matrices; whether they are effects is what check_closure decides.
struct CandidateProduct {
  std::string name;
  std::function<CMatrix(const Effect&, const Effect&)> op;

  CMatrix operator()(const Effect& a, const Effect& b) const { return op(a, b); }

  /// A^{1/2} B A^{1/2}
  static CandidateProduct standard(const ToleranceConfig& tol = {});
  /// A^{1/2} B^T A^{1/2}
  static CandidateProduct transpose_twisted(const ToleranceConfig& tol = {});
  /// U A^{1/2} B A^{1/2} U*
  static CandidateProduct unitary_twisted(CMatrix u, const ToleranceConfig& tol = {});
  /// (AB + BA) / 2
  static CandidateProduct jordan();
  /// (A, B) -> 0
  static CandidateProduct constant_zero();
};

/// Named matrices and scalars that fully determine one trial.
struct TrialInputs {
  std::vector<std::pair<std::string, CMatrix>> matrices;
  std::vector<std::pair<std::string, double>> scalars;

  void set(const std::string& name, CMatrix m);
  void set(const std::string& name, double x);
  const CMatrix& matrix(const std::string& name) const;
  double scalar(const std::string& name) const;
};

struct ViolationWitness {
  ConditionId condition = ConditionId::Closure;
  int dim = 0;
  std::size_t trial = 0;
  TrialInputs inputs;
  double residual = 0.0;
};

struct ConditionReport {
  ConditionId condition = ConditionId::Closure;
  int dim = 0;
  bool passed = true;
  double max_residual = 0.0;
  double tolerance = 0.0;
  std::size_t trials = 0;
  std::size_t evaluated = 0;         // trials that produced a residual
  std::size_t skipped = 0;           // trials whose inputs left E(H) or failed a precondition
  std::size_t closure_failures = 0;  // intermediate products that were not effects
  std::optional<std::size_t> argmax_trial;
  std::optional<ViolationWitness> witness;
};

/// Result of evaluating one trial.
struct TrialOutcome {
  double residual = 0.0;
  bool skipped = false;
  bool closure_failure = false;
};

/// max(||M - M*||, -lambda_min, lambda_max - 1) of the Hermitian part; infinity for
/// non-finite input. An output is an effect when this is <= psd_tol.
double closure_excess(const CMatrix& m);

/// Draws the inputs of one trial of the given condition.
TrialInputs sample_trial(ConditionId id, int dim, SplitMix64& rng);

/// Evaluates one trial. Used by every checker and by witness replay.
TrialOutcome evaluate_trial(ConditionId id, const CandidateProduct& prod, const TrialInputs& in,
                            const ToleranceConfig& tol);

/// Residual obtained by re-running the witness inputs through its checker.
double replay_witness(const CandidateProduct& prod, const ViolationWitness& w,
                      const ToleranceConfig& tol = {});

ConditionReport run_check(ConditionId id, const CandidateProduct& prod, int dim,
                          std::size_t trials, std::uint64_t seed, const ToleranceConfig& tol = {});

ConditionReport check_closure(const CandidateProduct& prod, int dim, std::size_t trials,
                              std::uint64_t seed, const ToleranceConfig& tol = {});
ConditionReport check_duality(const CandidateProduct& prod, int dim, std::size_t trials,
                              std::uint64_t seed, const ToleranceConfig& tol = {});
ConditionReport check_unit(const CandidateProduct& prod, int dim, std::size_t trials,
                           std::uint64_t seed, const ToleranceConfig& tol = {});
ConditionReport check_weak_assoc(const CandidateProduct& prod, int dim, std::size_t trials,
                                 std::uint64_t seed, const ToleranceConfig& tol = {});
ConditionReport check_continuity(const CandidateProduct& prod, int dim, std::size_t trials,
                                 std::uint64_t seed, const ToleranceConfig& tol = {});
ConditionReport check_purity(const CandidateProduct& prod, int dim, std::size_t trials,
                             std::uint64_t seed, const ToleranceConfig& tol = {});
ConditionReport check_lemma_affinity(const CandidateProduct& prod, int dim, std::size_t trials,
                                     std::uint64_t seed, const ToleranceConfig& tol = {});
ConditionReport check_half_duality(const CandidateProduct& prod, int dim, std::size_t trials,
                                   std::uint64_t seed, const ToleranceConfig& tol = {});
ConditionReport check_commuting_assoc(const CandidateProduct& prod, int dim, std::size_t trials,
                                      std::uint64_t seed, const ToleranceConfig& tol = {});
ConditionReport check_commuting_product(const CandidateProduct& prod, int dim, std::size_t trials,
                                        std::uint64_t seed, const ToleranceConfig& tol = {});

// Continuity probe: perturbations of size 10^-k for k in [kFirst, kLast], with
// the Hoelder-1/2 modulus ||(A+H)oB - AoB|| <= L ||H||^{1/2}.
inline constexpr int kContinuityFirstExponent = 2;
inline constexpr int kContinuityLastExponent = 6;
inline constexpr double kContinuityModulus = 100.0;

struct ContinuitySample {
  double perturbation_norm = 0.0;
  double output_change = 0.0;
};

/// Output change along A + t (target - A) with ||t (target - A)|| = 10^-k.
/// Convex combinations of effects stay effects.
std::vector<ContinuitySample> continuity_profile(const CandidateProduct& prod, const CMatrix& a,
                                                 const CMatrix& b, const CMatrix& target);

/// Commuting effects f(H), g(H) for a random H and random polynomials f, g
/// with non-negative coefficients summing to at most 1.
std::pair<CMatrix, CMatrix> random_commuting_pair(int dim, SplitMix64& rng);

struct FuzzReport {
  std::string candidate;
  std::vector<int> dims;
  std::size_t trials_per_condition = 0;
  std::uint64_t seed = 0;
  std::vector<ConditionReport> reports;
  double max_deviation_from_standard = 0.0;
  /// Non-standard on the sample yet every defining condition passed.
  bool theorem_tension = false;

  bool all_passed() const;
  bool any_witness() const;
  /// Conditions with at least one failing report, in kAllConditions order.
  std::vector<ConditionId> failed_conditions() const;
};

FuzzReport fuzz_candidate(const CandidateProduct& prod, const std::vector<int>& dims,
                          std::size_t trials_per_condition, std::uint64_t seed,
                          const ToleranceConfig& tol = {});

}  // namespace seqeffect
