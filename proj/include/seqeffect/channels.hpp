#pragma once

#include <cstddef>
#include <vector>

#include "seqeffect/effects.hpp"
#include "seqeffect/random.hpp"

namespace seqeffect {

/// Quantum operation rho -> sum_i A_i rho A_i* with sum_i A_i* A_i = I.
class KrausChannel {
 public:
  /// Throws NotTracePreserving when ||sum A_i* A_i - I|| > eq_tol.
  static KrausChannel from_elements(std::vector<CMatrix> elements, const ToleranceConfig& tol = {});

  const std::vector<CMatrix>& elements() const noexcept { return elements_; }
  std::size_t size() const noexcept { return elements_.size(); }
  int dim() const noexcept { return dim_; }

  /// ||sum A_i* A_i - I||
  double completeness_defect() const;

 private:
  KrausChannel(std::vector<CMatrix> elements, int dim) : elements_(std::move(elements)), dim_(dim) {}
  std::vector<CMatrix> elements_;
  int dim_ = 0;
};

/// Discrete observable {E_i} with sum_i E_i = I.
class DiscretePOVM {
 public:
  /// Validates each effect; throws NotAResolution when ||sum E_i - I|| > eq_tol.
  static DiscretePOVM from_effects(std::vector<CMatrix> effects, const ToleranceConfig& tol = {});

  const std::vector<Effect>& effects() const noexcept { return effects_; }
  std::size_t size() const noexcept { return effects_.size(); }
  int dim() const noexcept { return dim_; }

 private:
  DiscretePOVM(std::vector<Effect> effects, int dim) : effects_(std::move(effects)), dim_(dim) {}
  std::vector<Effect> effects_;
  int dim_ = 0;
};

DensityOperator apply_channel(const KrausChannel& ch, const DensityOperator& rho);

/// Post-measurement state A_i rho A_i* / Tr(A_i rho A_i*), or ZeroOutcome.
ConditionedState outcome_update(const KrausChannel& ch, std::size_t i, const DensityOperator& rho,
                                const ToleranceConfig& tol = {});

/// Tr(A_i rho A_i*) for every element.
std::vector<double> outcome_probabilities(const KrausChannel& ch, const DensityOperator& rho);

/// The channel with elements E_i^{1/2}.
KrausChannel instrument_from_povm(const DiscretePOVM& povm, const ToleranceConfig& tol = {});

/// ||E_i^{1/2} rho E_i^{1/2} - Tr(rho E_i) (rho|E_i)||. For a zero outcome the
/// residual is the norm of the unnormalized side.
double check_proba_identity(const DiscretePOVM& povm, std::size_t i, const DensityOperator& rho,
                            const ToleranceConfig& tol = {});

/// k-outcome POVM E_j = S^{-1/2} G_j S^{-1/2}, S = sum_j G_j, for random PSD G_j.
DiscretePOVM random_povm(int dim, int outcomes, SplitMix64& rng, const ToleranceConfig& tol = {});

/// Draws an index from a probability vector. Probabilities are renormalized.
std::size_t sample_outcome(const std::vector<double>& probabilities, SplitMix64& rng);

struct MeasurementStep {
  std::size_t outcome = 0;
  std::vector<double> probabilities;
  DensityOperator state;
};

/// Repeatedly measures povm starting from rho, updating by the Lueders instrument.
std::vector<MeasurementStep> simulate_measurements(const DiscretePOVM& povm,
                                                   const DensityOperator& rho, int steps,
                                                   SplitMix64& rng,
                                                   const ToleranceConfig& tol = {});

}  // namespace seqeffect
