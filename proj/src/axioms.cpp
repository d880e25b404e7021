#include "seqeffect/axioms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace seqeffect {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Names {
  ConditionId id;
  const char* name;
};

constexpr Names kNames[] = {
    {ConditionId::Closure, "CLOSURE"},
    {ConditionId::Duality, "DUALITY"},
    {ConditionId::Unit, "UNIT"},
    {ConditionId::WeakAssoc, "WEAK_ASSOC"},
    {ConditionId::Continuity, "CONTINUITY"},
    {ConditionId::Purity, "PURITY"},
    {ConditionId::Affinity, "AFFINITY"},
    {ConditionId::HalfDuality, "HALF_DUALITY"},
    {ConditionId::HalfAssoc, "HALF_ASSOC"},
    {ConditionId::CommutingProduct, "COMMUTING_PRODUCT"},
};

double distance(const CMatrix& x, const CMatrix& y) {
  if (!all_finite(x) || !all_finite(y)) return kInf;
  return op_norm((x - y).eval());
}

double finite_or_inf(double r) { return std::isfinite(r) ? r : kInf; }

CMatrix apply(const CandidateProduct& prod, const CMatrix& a, const CMatrix& b) {
  return prod(Effect::assume_valid(a), Effect::assume_valid(b));
}

std::uint64_t stream_of(ConditionId id, int dim) {
  return static_cast<std::uint64_t>(id) * 64u + static_cast<std::uint64_t>(dim);
}

constexpr std::uint64_t kDeviationStream = 1000u * 64u;

bool is_effect(const CMatrix& m, const ToleranceConfig& tol) {
  return closure_excess(m) <= tol.psd_tol;
}

TrialOutcome evaluate_closure(const CandidateProduct& prod, const TrialInputs& in) {
  return {closure_excess(apply(prod, in.matrix("A"), in.matrix("B")))};
}

TrialOutcome evaluate_duality(const CandidateProduct& prod, const TrialInputs& in) {
  const CMatrix& a = in.matrix("A");
  const CMatrix& b = in.matrix("B");
  const CMatrix& rho = in.matrix("rho");
  const CMatrix a_rho = apply(prod, a, rho);
  const CMatrix a_b = apply(prod, a, b);
  const Complex lhs = trace_of_product(a_rho, b);
  const Complex rhs = trace_of_product(rho, a_b);
  return {finite_or_inf(std::abs(lhs - rhs))};
}

TrialOutcome evaluate_unit(const CandidateProduct& prod, const TrialInputs& in) {
  const CMatrix& a = in.matrix("A");
  const CMatrix id = identity(static_cast<int>(a.rows()));
  return {std::max(distance(apply(prod, a, id), a), distance(apply(prod, id, a), a))};
}

TrialOutcome evaluate_weak_assoc(const CandidateProduct& prod, const TrialInputs& in,
                                 const ToleranceConfig& tol) {
  const CMatrix& a = in.matrix("A");
  const CMatrix& b = in.matrix("B");
  const CMatrix a2 = hermitian_part(a * a);
  const CMatrix aa = apply(prod, a, a);
  TrialOutcome out{distance(aa, a2)};
  const CMatrix ab = apply(prod, a, b);
  if (!is_effect(ab, tol) || !is_effect(aa, tol)) {
    out.closure_failure = true;
    return out;
  }
  const CMatrix left = apply(prod, a, ab);
  out.residual = std::max({out.residual, distance(left, apply(prod, aa, b)),
                           distance(left, apply(prod, a2, b))});
  return out;
}

TrialOutcome evaluate_continuity(const CandidateProduct& prod, const TrialInputs& in) {
  double excess = 0.0;
  for (const auto& s : continuity_profile(prod, in.matrix("A"), in.matrix("B"), in.matrix("target"))) {
    const double bound = kContinuityModulus * std::sqrt(s.perturbation_norm);
    excess = std::max(excess, finite_or_inf(s.output_change - bound));
  }
  return {excess};
}

TrialOutcome evaluate_purity(const CandidateProduct& prod, const TrialInputs& in,
                             const ToleranceConfig& tol) {
  const CMatrix out = apply(prod, in.matrix("A"), in.matrix("p"));
  if (!all_finite(out)) return {kInf};
  TrialOutcome res;
  res.closure_failure = !is_effect(out, tol);
  if (hermiticity_defect(out) > tol.eq_tol) {
    res.skipped = true;
    return res;
  }
  // Rank of the Hermitian output counted on |lambda|; an indefinite output of
  // rank 2 is still a purity violation.
  const auto eig = hermitian_eig_unchecked(out);
  std::vector<double> mags(static_cast<std::size_t>(eig.eigenvalues.size()));
  for (Eigen::Index k = 0; k < eig.eigenvalues.size(); ++k) {
    mags[static_cast<std::size_t>(k)] = std::abs(eig.eigenvalues(k));
  }
  std::sort(mags.begin(), mags.end(), std::greater<>());
  res.residual = mags.size() > 1 ? mags[1] : 0.0;
  return res;
}

TrialOutcome evaluate_affinity(const CandidateProduct& prod, const TrialInputs& in) {
  const CMatrix& a = in.matrix("A");
  const CMatrix& b = in.matrix("B");
  const CMatrix& c = in.matrix("C");
  const double lambda = in.scalar("lambda");
  const CMatrix mix = lambda * b + (1.0 - lambda) * c;
  const CMatrix expected = lambda * apply(prod, a, b) + (1.0 - lambda) * apply(prod, a, c);
  return {distance(apply(prod, a, mix), expected)};
}

TrialOutcome evaluate_half_duality(const CandidateProduct& prod, const TrialInputs& in,
                                   const ToleranceConfig& tol) {
  const CMatrix& a = in.matrix("A");
  const CMatrix& b = in.matrix("B");
  const CMatrix& rho = in.matrix("rho");
  const int dim = static_cast<int>(a.rows());
  TrialOutcome out;
  if (distance(apply(prod, b, identity(dim)), b) > tol.eq_tol) {
    out.skipped = true;  // B o I = B is the precondition
    return out;
  }
  const CMatrix eta = apply(prod, a, rho);
  if (!is_effect(eta, tol)) {
    out.skipped = true;
    out.closure_failure = true;
    return out;
  }
  if (eta.trace().real() <= tol.psd_tol) {
    out.skipped = true;
    return out;
  }
  const Complex lhs = trace_of_product(eta, b);
  const Complex rhs = apply(prod, b, eta).trace();
  out.residual = finite_or_inf(std::abs(lhs - rhs));
  return out;
}

TrialOutcome evaluate_half_assoc(const CandidateProduct& prod, const TrialInputs& in,
                                 const ToleranceConfig& tol) {
  const CMatrix& a = in.matrix("A");
  const CMatrix& b = in.matrix("B");
  const CMatrix& c = in.matrix("C");
  const CMatrix ab = apply(prod, a, b);
  const CMatrix bc = apply(prod, b, c);
  TrialOutcome out;
  if (!is_effect(ab, tol) || !is_effect(bc, tol)) {
    out.skipped = true;
    out.closure_failure = true;
    return out;
  }
  out.residual = distance(apply(prod, ab, c), apply(prod, a, bc));
  return out;
}

TrialOutcome evaluate_commuting_product(const CandidateProduct& prod, const TrialInputs& in) {
  const CMatrix& a = in.matrix("A");
  const CMatrix& b = in.matrix("B");
  const CMatrix ab = hermitian_part(a * b);
  return {std::max(distance(apply(prod, a, b), ab), distance(apply(prod, b, a), ab))};
}

}  // namespace

const char* to_string(ConditionId id) noexcept {
  for (const auto& n : kNames) {
    if (n.id == id) return n.name;
  }
  return "UNKNOWN";
}

std::optional<ConditionId> condition_from_string(const std::string& name) {
  for (const auto& n : kNames) {
    if (name == n.name) return n.id;
  }
  return std::nullopt;
}

bool is_defining_condition(ConditionId id) noexcept {
  switch (id) {
    case ConditionId::Duality:
    case ConditionId::Unit:
    case ConditionId::WeakAssoc:
    case ConditionId::Continuity:
    case ConditionId::Purity:
      return true;
    default:
      return false;
  }
}

double condition_tolerance(ConditionId id, const ToleranceConfig& tol) noexcept {
  switch (id) {
    case ConditionId::Closure: return tol.psd_tol;
    case ConditionId::Purity: return tol.rank_tol;
    default: return tol.eq_tol;
  }
}

CandidateProduct CandidateProduct::standard(const ToleranceConfig& tol) {
  return {"standard", [tol](const Effect& a, const Effect& b) {
            return conjugate_by_sqrt(a, b.matrix(), tol);
          }};
}

CandidateProduct CandidateProduct::transpose_twisted(const ToleranceConfig& tol) {
  return {"transpose", [tol](const Effect& a, const Effect& b) {
            return conjugate_by_sqrt(a, b.matrix().transpose().eval(), tol);
          }};
}

CandidateProduct CandidateProduct::unitary_twisted(CMatrix u, const ToleranceConfig& tol) {
  require_square(u);
  const double defect = op_norm((u * u.adjoint() - CMatrix::Identity(u.rows(), u.cols())).eval());
  if (defect > tol.eq_tol) {
    throw Error(ErrorCode::InvalidInput, "twist is not unitary, ||UU* - I|| = " + std::to_string(defect));
  }
  return {"unitary", [u = std::move(u), tol](const Effect& a, const Effect& b) {
            require_same_dim(u, a.matrix());
            return CMatrix(u * conjugate_by_sqrt(a, b.matrix(), tol) * u.adjoint());
          }};
}

CandidateProduct CandidateProduct::jordan() {
  return {"jordan", [](const Effect& a, const Effect& b) {
            return CMatrix(0.5 * (a.matrix() * b.matrix() + b.matrix() * a.matrix()));
          }};
}

CandidateProduct CandidateProduct::constant_zero() {
  return {"zero", [](const Effect& a, const Effect&) { return zero(a.dim()); }};
}

void TrialInputs::set(const std::string& name, CMatrix m) {
  for (auto& [n, v] : matrices) {
    if (n == name) {
      v = std::move(m);
      return;
    }
  }
  matrices.emplace_back(name, std::move(m));
}

void TrialInputs::set(const std::string& name, double x) {
  for (auto& [n, v] : scalars) {
    if (n == name) {
      v = x;
      return;
    }
  }
  scalars.emplace_back(name, x);
}

const CMatrix& TrialInputs::matrix(const std::string& name) const {
  for (const auto& [n, v] : matrices) {
    if (n == name) return v;
  }
  throw std::out_of_range("trial input '" + name + "' missing");
}

double TrialInputs::scalar(const std::string& name) const {
  for (const auto& [n, v] : scalars) {
    if (n == name) return v;
  }
  throw std::out_of_range("trial scalar '" + name + "' missing");
}

double closure_excess(const CMatrix& m) {
  if (m.rows() != m.cols() || m.size() == 0 || !all_finite(m)) return kInf;
  const double defect = hermiticity_defect(m);
  const auto eig = hermitian_eig_unchecked(m);
  const double lo = eig.eigenvalues(0);
  const double hi = eig.eigenvalues(eig.eigenvalues.size() - 1);
  return std::max({0.0, defect, -lo, hi - 1.0});
}

std::vector<ContinuitySample> continuity_profile(const CandidateProduct& prod, const CMatrix& a,
                                                 const CMatrix& b, const CMatrix& target) {
  const CMatrix base = apply(prod, a, b);
  const CMatrix direction = target - a;
  const double span = op_norm(direction);
  std::vector<ContinuitySample> out;
  for (int k = kContinuityFirstExponent; k <= kContinuityLastExponent; ++k) {
    const double size = std::pow(10.0, -k);
    const double t = span > 0.0 ? std::min(1.0, size / span) : 0.0;
    const CMatrix h = t * direction;
    ContinuitySample s;
    s.perturbation_norm = op_norm(h);
    s.output_change = distance(apply(prod, a + h, b), base);
    out.push_back(s);
  }
  return out;
}

std::pair<CMatrix, CMatrix> random_commuting_pair(int dim, SplitMix64& rng) {
  const CMatrix v = random_unitary(dim, rng);
  RVector h(dim);
  for (int k = 0; k < dim; ++k) h(k) = rng.uniform();

  auto polynomial = [&rng]() {
    double c[3] = {rng.uniform(), rng.uniform(), rng.uniform()};
    const double total = c[0] + c[1] + c[2];
    const double scale = total > 0.0 ? rng.uniform() / total : 0.0;
    for (double& x : c) x *= scale;
    return [c0 = c[0], c1 = c[1], c2 = c[2]](double x) { return c0 + c1 * x + c2 * x * x; };
  };
  const auto f = polynomial();
  const auto g = polynomial();
  RVector fa(dim), gb(dim);
  for (int k = 0; k < dim; ++k) {
    fa(k) = f(h(k));
    gb(k) = g(h(k));
  }
  const CMatrix a = hermitian_part(v * fa.cast<Complex>().asDiagonal() * v.adjoint());
  const CMatrix b = hermitian_part(v * gb.cast<Complex>().asDiagonal() * v.adjoint());
  return {a, b};
}

TrialInputs sample_trial(ConditionId id, int dim, SplitMix64& rng) {
  check_dim(dim);
  TrialInputs in;
  switch (id) {
    case ConditionId::Closure:
    case ConditionId::WeakAssoc:
      in.set("A", random_effect(dim, rng));
      in.set("B", random_effect(dim, rng));
      break;
    case ConditionId::Duality:
    case ConditionId::HalfDuality:
      in.set("A", random_effect(dim, rng));
      in.set("B", random_effect(dim, rng));
      in.set("rho", random_density(dim, rng));
      break;
    case ConditionId::Unit:
      in.set("A", random_effect(dim, rng));
      break;
    case ConditionId::Continuity:
      in.set("A", random_effect(dim, rng));
      in.set("B", random_effect(dim, rng));
      in.set("target", random_effect(dim, rng));
      break;
    case ConditionId::Purity:
      in.set("A", random_effect(dim, rng));
      in.set("p", random_rank1_projection(dim, rng));
      break;
    case ConditionId::Affinity:
      in.set("A", random_effect(dim, rng));
      in.set("B", random_effect(dim, rng));
      in.set("C", random_effect(dim, rng));
      in.set("lambda", rng.uniform());
      break;
    case ConditionId::HalfAssoc: {
      auto [a, b] = random_commuting_pair(dim, rng);
      in.set("A", std::move(a));
      in.set("B", std::move(b));
      in.set("C", random_effect(dim, rng));
      break;
    }
    case ConditionId::CommutingProduct: {
      auto [a, b] = random_commuting_pair(dim, rng);
      in.set("A", std::move(a));
      in.set("B", std::move(b));
      break;
    }
  }
  return in;
}

TrialOutcome evaluate_trial(ConditionId id, const CandidateProduct& prod, const TrialInputs& in,
                            const ToleranceConfig& tol) {
  try {
    switch (id) {
      case ConditionId::Closure: return evaluate_closure(prod, in);
      case ConditionId::Duality: return evaluate_duality(prod, in);
      case ConditionId::Unit: return evaluate_unit(prod, in);
      case ConditionId::WeakAssoc: return evaluate_weak_assoc(prod, in, tol);
      case ConditionId::Continuity: return evaluate_continuity(prod, in);
      case ConditionId::Purity: return evaluate_purity(prod, in, tol);
      case ConditionId::Affinity: return evaluate_affinity(prod, in);
      case ConditionId::HalfDuality: return evaluate_half_duality(prod, in, tol);
      case ConditionId::HalfAssoc: return evaluate_half_assoc(prod, in, tol);
      case ConditionId::CommutingProduct: return evaluate_commuting_product(prod, in);
    }
  } catch (const Error&) {
    return {kInf};  // the candidate rejected a valid effect pair
  }
  return {kInf};
}

double replay_witness(const CandidateProduct& prod, const ViolationWitness& w,
                      const ToleranceConfig& tol) {
  return evaluate_trial(w.condition, prod, w.inputs, tol).residual;
}

ConditionReport run_check(ConditionId id, const CandidateProduct& prod, int dim,
                          std::size_t trials, std::uint64_t seed, const ToleranceConfig& tol) {
  check_dim(dim);
  ConditionReport report;
  report.condition = id;
  report.dim = dim;
  report.trials = trials;
  report.tolerance = condition_tolerance(id, tol);

  const std::uint64_t stream = stream_of(id, dim);
  for (std::size_t t = 0; t < trials; ++t) {
    SplitMix64 rng(derive_seed(seed, stream, t));
    TrialInputs in = sample_trial(id, dim, rng);
    const TrialOutcome outcome = evaluate_trial(id, prod, in, tol);
    if (outcome.closure_failure) ++report.closure_failures;
    if (outcome.skipped) {
      ++report.skipped;
      continue;
    }
    ++report.evaluated;
    if (!report.argmax_trial || outcome.residual > report.max_residual) {
      report.max_residual = outcome.residual;
      report.argmax_trial = t;
    }
    if (outcome.residual > report.tolerance &&
        (!report.witness || outcome.residual > report.witness->residual)) {
      report.witness = ViolationWitness{id, dim, t, std::move(in), outcome.residual};
    }
  }
  report.passed = report.max_residual <= report.tolerance && !report.witness;
  return report;
}

ConditionReport check_closure(const CandidateProduct& prod, int dim, std::size_t trials,
                              std::uint64_t seed, const ToleranceConfig& tol) {
  return run_check(ConditionId::Closure, prod, dim, trials, seed, tol);
}
ConditionReport check_duality(const CandidateProduct& prod, int dim, std::size_t trials,
                              std::uint64_t seed, const ToleranceConfig& tol) {
  return run_check(ConditionId::Duality, prod, dim, trials, seed, tol);
}
ConditionReport check_unit(const CandidateProduct& prod, int dim, std::size_t trials,
                           std::uint64_t seed, const ToleranceConfig& tol) {
  return run_check(ConditionId::Unit, prod, dim, trials, seed, tol);
}
ConditionReport check_weak_assoc(const CandidateProduct& prod, int dim, std::size_t trials,
                                 std::uint64_t seed, const ToleranceConfig& tol) {
  return run_check(ConditionId::WeakAssoc, prod, dim, trials, seed, tol);
}
ConditionReport check_continuity(const CandidateProduct& prod, int dim, std::size_t trials,
                                 std::uint64_t seed, const ToleranceConfig& tol) {
  return run_check(ConditionId::Continuity, prod, dim, trials, seed, tol);
}
ConditionReport check_purity(const CandidateProduct& prod, int dim, std::size_t trials,
                             std::uint64_t seed, const ToleranceConfig& tol) {
  return run_check(ConditionId::Purity, prod, dim, trials, seed, tol);
}
ConditionReport check_lemma_affinity(const CandidateProduct& prod, int dim, std::size_t trials,
                                     std::uint64_t seed, const ToleranceConfig& tol) {
  return run_check(ConditionId::Affinity, prod, dim, trials, seed, tol);
}
ConditionReport check_half_duality(const CandidateProduct& prod, int dim, std::size_t trials,
                                   std::uint64_t seed, const ToleranceConfig& tol) {
  return run_check(ConditionId::HalfDuality, prod, dim, trials, seed, tol);
}
ConditionReport check_commuting_assoc(const CandidateProduct& prod, int dim, std::size_t trials,
                                      std::uint64_t seed, const ToleranceConfig& tol) {
  return run_check(ConditionId::HalfAssoc, prod, dim, trials, seed, tol);
}
ConditionReport check_commuting_product(const CandidateProduct& prod, int dim, std::size_t trials,
                                        std::uint64_t seed, const ToleranceConfig& tol) {
  return run_check(ConditionId::CommutingProduct, prod, dim, trials, seed, tol);
}

bool FuzzReport::all_passed() const {
  return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.passed; });
}

bool FuzzReport::any_witness() const {
  return std::any_of(reports.begin(), reports.end(),
                     [](const auto& r) { return r.witness.has_value(); });
}

std::vector<ConditionId> FuzzReport::failed_conditions() const {
  std::vector<ConditionId> out;
  for (ConditionId id : kAllConditions) {
    const bool failed = std::any_of(reports.begin(), reports.end(), [id](const auto& r) {
      return r.condition == id && !r.passed;
    });
    if (failed) out.push_back(id);
  }
  return out;
}

FuzzReport fuzz_candidate(const CandidateProduct& prod, const std::vector<int>& dims,
                          std::size_t trials_per_condition, std::uint64_t seed,
                          const ToleranceConfig& tol) {
  for (int d : dims) check_dim(d);
  FuzzReport report;
  report.candidate = prod.name;
  report.dims = dims;
  report.trials_per_condition = trials_per_condition;
  report.seed = seed;

  const CandidateProduct standard = CandidateProduct::standard(tol);
  for (int dim : dims) {
    for (ConditionId id : kAllConditions) {
      report.reports.push_back(run_check(id, prod, dim, trials_per_condition, seed, tol));
    }
    for (std::size_t t = 0; t < trials_per_condition; ++t) {
      SplitMix64 rng(derive_seed(seed, kDeviationStream + static_cast<std::uint64_t>(dim), t));
      const CMatrix a = random_effect(dim, rng);
      const CMatrix b = random_effect(dim, rng);
      double dev = kInf;
      try {
        dev = distance(apply(prod, a, b), apply(standard, a, b));
      } catch (const Error&) {
      }
      report.max_deviation_from_standard = std::max(report.max_deviation_from_standard, dev);
    }
  }

  const bool defining_pass = std::all_of(report.reports.begin(), report.reports.end(),
                                         [](const auto& r) {
                                           return !is_defining_condition(r.condition) || r.passed;
                                         });
  report.theorem_tension = defining_pass && report.max_deviation_from_standard > tol.eq_tol;
  return report;
}

}  // namespace seqeffect
