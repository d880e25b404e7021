#pragma once

#include <optional>
#include <variant>

#include "seqeffect/matcore.hpp"

namespace seqeffect {

/// A quantum effect 0 <= A <= I, validated up to tolerance.
class Effect {
 public:
  /// Validates Hermiticity and spectrum in [-psd_tol, 1 + psd_tol].
  static Effect from_matrix(CMatrix m, const ToleranceConfig& tol = {});

  /// Wraps a matrix already known to be an effect (symmetrized, not checked).
  static Effect assume_valid(CMatrix m);

  static Effect identity(int dim) { return assume_valid(seqeffect::identity(dim)); }
  static Effect zero(int dim) { return assume_valid(seqeffect::zero(dim)); }

  const CMatrix& matrix() const noexcept { return matrix_; }
  int dim() const noexcept { return static_cast<int>(matrix_.rows()); }

  /// The same effect with its spectrum clamped to [0, 1].
  Effect clamped() const;

  /// How far the spectrum strays outside [0, 1] (0 for an exact effect).
  double clamp_excess() const;

  CMatrix sqrt(const ToleranceConfig& tol = {}) const { return sqrt_psd(matrix_, tol); }

 private:
  explicit Effect(CMatrix m) : matrix_(std::move(m)) {}
  CMatrix matrix_;
};

/// A density operator: PSD with unit trace, or trace in [0, 1] when sub_normalized.
class DensityOperator {
 public:
  static DensityOperator from_matrix(CMatrix m, const ToleranceConfig& tol = {});
  static DensityOperator sub_normalized(CMatrix m, const ToleranceConfig& tol = {});
  static DensityOperator assume_valid(CMatrix m, bool sub_normalized = false);

  /// |psi><psi| for a (not necessarily normalized) vector.
  static DensityOperator pure(const CVector& psi);

  const CMatrix& matrix() const noexcept { return matrix_; }
  int dim() const noexcept { return static_cast<int>(matrix_.rows()); }
  bool is_sub_normalized() const noexcept { return sub_normalized_; }
  double trace() const { return matrix_.trace().real(); }

  /// Every state is an effect.
  Effect as_effect() const { return Effect::assume_valid(matrix_); }

 private:
  DensityOperator(CMatrix m, bool sub) : matrix_(std::move(m)), sub_normalized_(sub) {}
  CMatrix matrix_;
  bool sub_normalized_ = false;
};

/// An orthogonal projection, P^2 = P within eq_tol.
class Projection {
 public:
  static Projection from_matrix(CMatrix m, const ToleranceConfig& tol = {});
  static Projection onto(const CVector& v);

  const Effect& effect() const noexcept { return effect_; }
  const CMatrix& matrix() const noexcept { return effect_.matrix(); }
  operator const Effect&() const noexcept { return effect_; }

 private:
  explicit Projection(Effect e) : effect_(std::move(e)) {}
  Effect effect_;
};

/// Conditioning on an outcome of probability <= psd_tol.
struct ZeroOutcome {
  double probability = 0.0;
};

using ConditionedState = std::variant<DensityOperator, ZeroOutcome>;

inline bool is_zero_outcome(const ConditionedState& s) {
  return std::holds_alternative<ZeroOutcome>(s);
}

/// A o B = A^{1/2} B A^{1/2}.
Effect standard_seq_product(const Effect& a, const Effect& b, const ToleranceConfig& tol = {});

/// Same product on raw matrices; B need not be an effect.
CMatrix conjugate_by_sqrt(const Effect& a, const CMatrix& b, const ToleranceConfig& tol = {});

/// Tr(rho A), clamped to [0, 1].
double probability(const DensityOperator& rho, const Effect& a);

/// Lueders update A^{1/2} rho A^{1/2} / Tr(rho A), or ZeroOutcome when the
/// probability is at most psd_tol.
ConditionedState luders_condition(const DensityOperator& rho, const Effect& a,
                                  const ToleranceConfig& tol = {});

/// ||AB - BA|| <= eq_tol
bool commutes(const Effect& a, const Effect& b, const ToleranceConfig& tol = {});

}  // namespace seqeffect
