#include "seqeffect/channels.hpp"

#include <numeric>
#include <string>

namespace seqeffect {

KrausChannel KrausChannel::from_elements(std::vector<CMatrix> elements, const ToleranceConfig& tol) {
  if (elements.empty()) throw Error(ErrorCode::InvalidInput, "channel needs at least one element");
  const int dim = static_cast<int>(elements.front().rows());
  for (const auto& e : elements) {
    require_same_dim(elements.front(), e);
    require_square(e);
  }
  KrausChannel ch(std::move(elements), dim);
  const double defect = ch.completeness_defect();
  if (defect > tol.eq_tol) {
    throw Error(ErrorCode::NotTracePreserving, "||sum A*A - I|| = " + std::to_string(defect));
  }
  return ch;
}

double KrausChannel::completeness_defect() const {
  CMatrix sum = CMatrix::Zero(dim_, dim_);
  for (const auto& a : elements_) sum += a.adjoint() * a;
  return op_norm((sum - identity(dim_)).eval());
}

DiscretePOVM DiscretePOVM::from_effects(std::vector<CMatrix> effects, const ToleranceConfig& tol) {
  if (effects.empty()) throw Error(ErrorCode::InvalidInput, "POVM needs at least one effect");
  const int dim = static_cast<int>(effects.front().rows());
  std::vector<Effect> checked;
  checked.reserve(effects.size());
  CMatrix sum = CMatrix::Zero(dim, dim);
  for (const auto& m : effects) require_same_dim(effects.front(), m);
  for (auto& m : effects) {
    checked.push_back(Effect::from_matrix(std::move(m), tol));
    sum += checked.back().matrix();
  }
  const double defect = op_norm((sum - identity(dim)).eval());
  if (defect > tol.eq_tol) {
    throw Error(ErrorCode::NotAResolution, "||sum E_i - I|| = " + std::to_string(defect));
  }
  return DiscretePOVM(std::move(checked), dim);
}

DensityOperator apply_channel(const KrausChannel& ch, const DensityOperator& rho) {
  require_same_dim(ch.elements().front(), rho.matrix());
  CMatrix out = CMatrix::Zero(ch.dim(), ch.dim());
  for (const auto& a : ch.elements()) out += a * rho.matrix() * a.adjoint();
  return DensityOperator::assume_valid(std::move(out), rho.is_sub_normalized());
}

ConditionedState outcome_update(const KrausChannel& ch, std::size_t i, const DensityOperator& rho,
                                const ToleranceConfig& tol) {
  if (i >= ch.size()) {
    throw Error(ErrorCode::IndexOutOfRange,
                "outcome " + std::to_string(i) + " of " + std::to_string(ch.size()));
  }
  require_same_dim(ch.elements()[i], rho.matrix());
  const CMatrix& a = ch.elements()[i];
  const CMatrix unnormalized = hermitian_part(a * rho.matrix() * a.adjoint());
  const double p = unnormalized.trace().real();
  if (p <= tol.psd_tol) return ZeroOutcome{std::max(p, 0.0)};
  return DensityOperator::assume_valid(unnormalized / p);
}

std::vector<double> outcome_probabilities(const KrausChannel& ch, const DensityOperator& rho) {
  require_same_dim(ch.elements().front(), rho.matrix());
  std::vector<double> p;
  p.reserve(ch.size());
  for (const auto& a : ch.elements()) {
    p.push_back((a * rho.matrix() * a.adjoint()).trace().real());
  }
  return p;
}

KrausChannel instrument_from_povm(const DiscretePOVM& povm, const ToleranceConfig& tol) {
  std::vector<CMatrix> roots;
  roots.reserve(povm.size());
  for (const auto& e : povm.effects()) roots.push_back(e.sqrt(tol));
  return KrausChannel::from_elements(std::move(roots), tol);
}

double check_proba_identity(const DiscretePOVM& povm, std::size_t i, const DensityOperator& rho,
                            const ToleranceConfig& tol) {
  if (i >= povm.size()) {
    throw Error(ErrorCode::IndexOutOfRange,
                "outcome " + std::to_string(i) + " of " + std::to_string(povm.size()));
  }
  const Effect& e = povm.effects()[i];
  const CMatrix lhs = conjugate_by_sqrt(e, rho.matrix(), tol);
  const auto conditioned = luders_condition(rho, e, tol);
  if (is_zero_outcome(conditioned)) return op_norm(lhs);
  const double p = trace_of_product(rho.matrix(), e.matrix()).real();
  const CMatrix rhs = p * std::get<DensityOperator>(conditioned).matrix();
  return op_norm((lhs - rhs).eval());
}

DiscretePOVM random_povm(int dim, int outcomes, SplitMix64& rng, const ToleranceConfig& tol) {
  check_dim(dim);
  if (outcomes < 1) throw Error(ErrorCode::InvalidInput, "POVM needs at least one outcome");
  std::vector<CMatrix> blocks;
  blocks.reserve(static_cast<std::size_t>(outcomes));
  CMatrix sum = CMatrix::Zero(dim, dim);
  for (int j = 0; j < outcomes; ++j) {
    const CMatrix g = random_ginibre(dim, dim, rng);
    blocks.push_back(hermitian_part(g * g.adjoint()));
    sum += blocks.back();
  }
  const auto eig = hermitian_eig(sum, tol);
  const double floor = eig.eigenvalues(0) < tol.psd_tol ? tol.psd_tol : 0.0;
  const CMatrix inv_root =
      apply_spectral(eig, [floor](double x) { return 1.0 / std::sqrt(x + floor); });
  std::vector<CMatrix> effects;
  effects.reserve(blocks.size());
  for (const auto& g : blocks) effects.push_back(hermitian_part(inv_root * g * inv_root));
  return DiscretePOVM::from_effects(std::move(effects), tol);
}

std::size_t sample_outcome(const std::vector<double>& probabilities, SplitMix64& rng) {
  if (probabilities.empty()) throw Error(ErrorCode::InvalidInput, "no outcomes to sample");
  double total = 0.0;
  for (double p : probabilities) total += std::max(p, 0.0);
  if (!(total > 0.0)) throw Error(ErrorCode::InvalidInput, "outcome probabilities sum to zero");
  const double u = rng.uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const double p = std::max(probabilities[i], 0.0);
    if (p > 0.0) last_positive = i;
    acc += p;
    if (u < acc) return i;
  }
  return last_positive;
}

std::vector<MeasurementStep> simulate_measurements(const DiscretePOVM& povm,
                                                   const DensityOperator& rho, int steps,
                                                   SplitMix64& rng, const ToleranceConfig& tol) {
  if (steps < 1) throw Error(ErrorCode::InvalidInput, "steps must be >= 1");
  require_same_dim(povm.effects().front().matrix(), rho.matrix());
  const KrausChannel instrument = instrument_from_povm(povm, tol);
  std::vector<MeasurementStep> out;
  out.reserve(static_cast<std::size_t>(steps));
  DensityOperator state = rho;
  for (int s = 0; s < steps; ++s) {
    std::vector<double> probs = outcome_probabilities(instrument, state);
    for (double& p : probs) p = std::clamp(p, 0.0, 1.0);
    const std::size_t k = sample_outcome(probs, rng);
    // An outcome with probability <= psd_tol leaves the state unchanged.
    auto next = outcome_update(instrument, k, state, tol);
    if (!is_zero_outcome(next)) state = std::get<DensityOperator>(std::move(next));
    out.push_back(MeasurementStep{k, std::move(probs), state});
  }
  return out;
}

}  // namespace seqeffect
