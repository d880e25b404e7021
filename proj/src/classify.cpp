#include "seqeffect/classify.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace seqeffect {

namespace {

CMatrix unit(int dim, int j, int k) {
  CMatrix e = CMatrix::Zero(dim, dim);
  e(j, k) = 1.0;
  return e;
}

double distance(const CMatrix& x, const CMatrix& y) {
  if (!all_finite(x) || !all_finite(y)) return std::numeric_limits<double>::infinity();
  return op_norm((x - y).eval());
}

/// Rotates the global phase so that `anchor` becomes real and positive.
template <typename Derived>
void fix_phase(Eigen::MatrixBase<Derived>& m, Complex anchor) {
  const double mag = std::abs(anchor);
  if (mag > 0.0) m *= std::conj(anchor) / mag;
}

Complex largest_entry(const CMatrix& m) {
  Complex best = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (std::abs(m(i, j)) > std::abs(best) + 1e-14) best = m(i, j);
  return best;
}

enum class RankOne { Yes, No, Borderline };

struct RankOneFactor {
  RankOne status = RankOne::No;
  CVector vector;  // J = v v*
};

/// Rank-one PSD factorization of a Hermitian matrix. A second eigenvalue within
/// a factor 10 of rank_tol is reported as Borderline.
RankOneFactor rank_one_factor(const CMatrix& j, const ToleranceConfig& tol) {
  const auto eig = hermitian_eig_unchecked(j);
  const Eigen::Index n = eig.eigenvalues.size();
  RankOneFactor out;
  if (eig.eigenvalues(0) < -tol.psd_tol) return out;
  const double top = eig.eigenvalues(n - 1);
  const double second = n > 1 ? std::abs(eig.eigenvalues(n - 2)) : 0.0;
  if (second > 10.0 * tol.rank_tol) return out;
  if (second >= tol.rank_tol / 10.0) {
    out.status = RankOne::Borderline;
    return out;
  }
  out.status = RankOne::Yes;
  out.vector = std::sqrt(std::max(top, 0.0)) * eig.eigenvectors.col(n - 1);
  return out;
}

/// C from x(a*d + j) = C*(a, j), with Tr C made real and non-negative.
CMatrix factor_from_choi_vector(const CVector& x, int dim) {
  CMatrix c_star(dim, dim);
  for (int a = 0; a < dim; ++a)
    for (int j = 0; j < dim; ++j) c_star(a, j) = x(a * dim + j);
  CMatrix c = c_star.adjoint();
  const Complex tr = c.trace();
  fix_phase(c, std::abs(tr) > 1e-12 ? tr : largest_entry(c));
  return c;
}

}  // namespace

Superoperator::Superoperator(int dim, CMatrix choi) : dim_(dim), choi_(std::move(choi)) {
  if (dim < 1 || choi_.rows() != dim * dim || choi_.cols() != dim * dim) {
    throw Error(ErrorCode::DimMismatch, "Choi matrix must be d^2 x d^2");
  }
}

Superoperator Superoperator::from_linear_map(int dim,
                                             const std::function<CMatrix(const CMatrix&)>& map) {
  CMatrix choi(dim * dim, dim * dim);
  for (int j = 0; j < dim; ++j) {
    for (int k = 0; k < dim; ++k) {
      const CMatrix out = map(unit(dim, j, k));
      require_square(out);
      if (out.rows() != dim) throw Error(ErrorCode::DimMismatch, "map changed dimension");
      for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) choi(a * dim + j, b * dim + k) = out(a, b);
    }
  }
  return Superoperator(dim, std::move(choi));
}

CMatrix Superoperator::image_of_unit(int j, int k) const {
  CMatrix out(dim_, dim_);
  for (int a = 0; a < dim_; ++a)
    for (int b = 0; b < dim_; ++b) out(a, b) = choi_(a * dim_ + j, b * dim_ + k);
  return out;
}

CMatrix Superoperator::apply(const CMatrix& x) const {
  require_square(x);
  if (x.rows() != dim_) throw Error(ErrorCode::DimMismatch, "input dimension");
  CMatrix out = CMatrix::Zero(dim_, dim_);
  for (int j = 0; j < dim_; ++j)
    for (int k = 0; k < dim_; ++k)
      if (x(j, k) != Complex(0.0)) out += x(j, k) * image_of_unit(j, k);
  return out;
}

CMatrix Superoperator::choi_of_transpose_composition() const {
  CMatrix out(choi_.rows(), choi_.cols());
  for (int a = 0; a < dim_; ++a)
    for (int b = 0; b < dim_; ++b)
      for (int j = 0; j < dim_; ++j)
        for (int k = 0; k < dim_; ++k)
          out(a * dim_ + j, b * dim_ + k) = choi_(a * dim_ + k, b * dim_ + j);
  return out;
}

double Superoperator::distance(const Superoperator& other) const {
  if (other.dim_ != dim_) throw Error(ErrorCode::DimMismatch, "superoperator dimensions differ");
  double worst = 0.0;
  for (int j = 0; j < dim_; ++j)
    for (int k = 0; k < dim_; ++k)
      worst = std::max(worst, seqeffect::distance(image_of_unit(j, k), other.image_of_unit(j, k)));
  return worst;
}

Superoperator superoperator_from_product(const CandidateProduct& prod, const Effect& a,
                                         const ToleranceConfig& tol) {
  const int dim = a.dim();
  auto phi = [&](const CMatrix& probe) { return prod(a, Effect::assume_valid(probe)); };

  std::vector<CMatrix> images(static_cast<std::size_t>(dim * dim));
  auto slot = [&](int j, int k) -> CMatrix& { return images[static_cast<std::size_t>(j * dim + k)]; };

  for (int j = 0; j < dim; ++j) slot(j, j) = phi(unit(dim, j, j));
  const double r = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < dim; ++j) {
    for (int k = j + 1; k < dim; ++k) {
      CVector plus = CVector::Zero(dim);
      plus(j) = r;
      plus(k) = r;
      CVector twisted = CVector::Zero(dim);
      twisted(j) = r;
      twisted(k) = Complex(0.0, r);
      // e_jk + e_kj and i(e_kj - e_jk) in terms of the probes.
      const CMatrix sym = 2.0 * phi(outer(plus)) - slot(j, j) - slot(k, k);
      const CMatrix skew = 2.0 * phi(outer(twisted)) - slot(j, j) - slot(k, k);
      slot(j, k) = 0.5 * (sym + Complex(0.0, 1.0) * skew);
      slot(k, j) = 0.5 * (sym - Complex(0.0, 1.0) * skew);
    }
  }

  CMatrix choi(dim * dim, dim * dim);
  for (int j = 0; j < dim; ++j)
    for (int k = 0; k < dim; ++k)
      for (int x = 0; x < dim; ++x)
        for (int y = 0; y < dim; ++y) choi(x * dim + j, y * dim + k) = slot(j, k)(x, y);
  Superoperator s(dim, std::move(choi));

  std::vector<CMatrix> probes = {zero(dim), identity(dim)};
  SplitMix64 rng(derive_seed(0x5eedu, 0xaff1e, static_cast<std::uint64_t>(dim)));
  for (int i = 0; i < 3; ++i) probes.push_back(random_effect(dim, rng));
  double worst = 0.0;
  for (const auto& p : probes) worst = std::max(worst, distance(s.apply(p), phi(p)));
  if (!(worst <= tol.eq_tol)) {
    throw Error(ErrorCode::NotAffine,
                "linear extension misses the product by " + std::to_string(worst));
  }
  return s;
}

const char* to_string(PureMapForm form) noexcept {
  switch (form) {
    case PureMapForm::Conjugation: return "CONJUGATION";
    case PureMapForm::AntiConjugation: return "ANTI_CONJUGATION";
    case PureMapForm::RankOneOutput: return "RANK_ONE_OUTPUT";
    case PureMapForm::Unclassified: return "UNCLASSIFIED";
  }
  return "UNCLASSIFIED";
}

PureMapClassification classify_pure_positive(const Superoperator& s, const ToleranceConfig& tol) {
  const int dim = s.dim();
  PureMapClassification out;

  if (!all_finite(s.choi()) || hermiticity_defect(s.choi()) > tol.hermit_tol) {
    out.note = "map is not Hermiticity-preserving";
    return out;
  }

  auto accept = [&](PureMapClassification cand, const Superoperator& rebuilt) {
    cand.residual = s.distance(rebuilt);
    if (cand.residual > tol.eq_tol) {
      PureMapClassification bad;
      bad.residual = cand.residual;
      bad.note = std::string("reconstruction of ") + to_string(cand.form) + " form failed";
      return bad;
    }
    return cand;
  };

  // (i) X -> C* X C: Choi is rank-one PSD.
  const RankOneFactor direct = rank_one_factor(s.choi(), tol);
  if (direct.status == RankOne::Borderline) {
    out.note = "Choi spectrum borderline at rank_tol";
    return out;
  }
  if (direct.status == RankOne::Yes) {
    PureMapClassification cand;
    cand.form = PureMapForm::Conjugation;
    cand.c = factor_from_choi_vector(direct.vector, dim);
    const CMatrix c = *cand.c;
    return accept(std::move(cand), Superoperator::from_linear_map(dim, [&c](const CMatrix& x) {
                    return CMatrix(c.adjoint() * x * c);
                  }));
  }

  // (ii) X -> C* X^T C: the transpose-composed Choi is rank-one PSD.
  const RankOneFactor twisted = rank_one_factor(s.choi_of_transpose_composition(), tol);
  if (twisted.status == RankOne::Borderline) {
    out.note = "transposed Choi spectrum borderline at rank_tol";
    return out;
  }
  if (twisted.status == RankOne::Yes) {
    PureMapClassification cand;
    cand.form = PureMapForm::AntiConjugation;
    cand.c = factor_from_choi_vector(twisted.vector, dim);
    const CMatrix c = *cand.c;
    return accept(std::move(cand), Superoperator::from_linear_map(dim, [&c](const CMatrix& x) {
                    return CMatrix(c.adjoint() * x.transpose() * c);
                  }));
  }

  // (iii) X -> Tr(X B) |psi><psi|: Phi(I) = Tr(B) P_psi and B(k, j) = Tr Phi(e_jk).
  CMatrix phi_identity = CMatrix::Zero(dim, dim);
  CMatrix b_op(dim, dim);
  for (int j = 0; j < dim; ++j) {
    phi_identity += s.image_of_unit(j, j);
    for (int k = 0; k < dim; ++k) b_op(k, j) = s.image_of_unit(j, k).trace();
  }
  const auto range = rank_one_factor(phi_identity, tol);
  if (range.status == RankOne::Borderline) {
    out.note = "output range borderline at rank_tol";
    return out;
  }
  if (range.status == RankOne::Yes && range.vector.norm() > 0.0) {
    const auto b_eig = hermitian_eig_unchecked(b_op);
    if (hermiticity_defect(b_op) <= tol.hermit_tol && b_eig.eigenvalues(0) >= -tol.psd_tol) {
      CVector psi = range.vector / range.vector.norm();
      Eigen::Index at = 0;
      psi.cwiseAbs().maxCoeff(&at);
      fix_phase(psi, psi(at));
      PureMapClassification cand;
      cand.form = PureMapForm::RankOneOutput;
      cand.b_op = hermitian_part(b_op);
      cand.psi = psi;
      const CMatrix b = *cand.b_op;
      const CMatrix proj = outer(psi);
      return accept(std::move(cand), Superoperator::from_linear_map(dim, [&](const CMatrix& x) {
                      return CMatrix(trace_of_product(x, b) * proj);
                    }));
    }
  }

  out.note = "no pure positive form fits";
  return out;
}

bool ProofTraceReport::all_passed() const {
  return std::all_of(steps.begin(), steps.end(), [](const ProofStep& s) { return s.passed; });
}

const ProofStep* ProofTraceReport::first_failure() const {
  for (const auto& s : steps) {
    if (!s.passed) return &s;
  }
  return nullptr;
}

ProofTraceReport trace_theorem_steps(const CandidateProduct& prod, const Effect& a,
                                     const ToleranceConfig& tol, std::uint64_t probe_seed) {
  const int dim = a.dim();
  const CMatrix& am = a.matrix();
  const auto eig = hermitian_eig(am, tol);
  if (eig.eigenvalues(0) <= 10.0 * tol.psd_tol) {
    throw Error(ErrorCode::NotInvertible,
                "smallest eigenvalue " + std::to_string(eig.eigenvalues(0)) + " <= 10 psd_tol");
  }

  ProofTraceReport report;
  report.candidate = prod.name;
  report.a = am;
  auto step = [&](std::string name, double residual) {
    report.steps.push_back({std::move(name), residual, residual <= tol.eq_tol});
  };
  auto call = [&](const CMatrix& x, const CMatrix& y) {
    return prod(Effect::assume_valid(x), Effect::assume_valid(y));
  };

  SplitMix64 rng(derive_seed(probe_seed, 0x7ace, static_cast<std::uint64_t>(dim)));
  std::vector<CMatrix> probes;
  for (std::size_t i = 0; i < kTraceProbeCount; ++i) probes.push_back(random_effect(dim, rng));
  const CMatrix id = identity(dim);

  double unit = std::max(distance(call(am, id), am), distance(call(id, am), am));
  for (const auto& x : probes) {
    unit = std::max({unit, distance(call(x, id), x), distance(call(id, x), x)});
  }
  step("unit_probe", unit);

  double duality = 0.0;
  for (const auto& b : probes) {
    const CMatrix rho = random_density(dim, rng);
    const Complex lhs = trace_of_product(call(am, rho), b);
    const Complex rhs = trace_of_product(rho, call(am, b));
    duality = std::max(duality, std::abs(lhs - rhs));
  }
  step("duality_probe", duality);

  const Superoperator s = superoperator_from_product(prod, a, tol);
  const PureMapClassification cls = classify_pure_positive(s, tol);
  if (cls.form == PureMapForm::Unclassified) {
    throw Error(ErrorCode::UnclassifiedMap, cls.note);
  }
  report.form = cls.form;
  report.c = cls.c;
  report.steps.push_back({"classification", cls.residual, cls.form == PureMapForm::Conjugation});

  const CMatrix sqrt_a = sqrt_psd(am, tol);
  report.sqrt_a = sqrt_a;

  if (cls.form == PureMapForm::RankOneOutput) {
    // Duality with the unit gives Tr(rho B) = Tr(A o rho) = Tr(rho A) on every
    // matrix unit, so B = A; A = A o I then has rank one.
    step("rank_one_b_equals_a", distance(*cls.b_op, am));
    step("rank_one_unit_output", distance(call(am, id), am));
  }

  if (cls.form == PureMapForm::Conjugation) {
    const CMatrix& c = *cls.c;
    step("gram_identity", distance(c.adjoint() * c, am));

    const auto polar = polar_decompose(c);
    const CMatrix& u = polar.isometry;
    report.isometry = u;
    step("polar_modulus", std::max(distance(polar.modulus, sqrt_a), distance(u * polar.modulus, c)));
    step("root_isometry", distance(sqrt_a * u.adjoint() * u * sqrt_a, am));
    step("isometry", distance(u.adjoint() * u, id));

    double transport = 0.0;
    for (const auto& b : probes) {
      transport = std::max(transport, distance(sqrt_a * u.adjoint() * b * u * sqrt_a,
                                               u * sqrt_a * b * sqrt_a * u.adjoint()));
    }
    step("conjugation_transport", transport);
    step("u_commutes_with_a", distance(u * am, am * u));
    step("unitary", distance(u * u.adjoint(), id));

    const CMatrix u2 = u * u;
    const Complex mu = u2.trace() / static_cast<double>(dim);
    report.mu = mu;
    step("u_squared_scalar", std::max(distance(u2, mu * id), std::abs(std::abs(mu) - 1.0)));

    double reduction = 0.0;
    for (const auto& b : probes) {
      reduction = std::max(reduction, distance(call(am, call(am, b)), am * b * am));
    }
    step("weak_assoc_reduction", reduction);
  }

  double final_residual = 0.0;
  for (std::size_t i = 0; i < kTraceFinalProbeCount; ++i) {
    const CMatrix b = random_effect(dim, rng);
    final_residual = std::max(final_residual, distance(call(am, b), sqrt_a * b * sqrt_a));
  }
  step("final_identity", final_residual);
  return report;
}

Effect regularize_invertible(const Effect& a, int i) {
  if (i < 1) throw Error(ErrorCode::InvalidInput, "regularization index must be >= 1");
  const double n = static_cast<double>(i);
  return Effect::assume_valid((n * a.matrix() + identity(a.dim())) / (n + 1.0));
}

}  // namespace seqeffect
