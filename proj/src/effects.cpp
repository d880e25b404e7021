#include "seqeffect/effects.hpp"

#include <algorithm>
#include <string>

namespace seqeffect {

Effect Effect::from_matrix(CMatrix m, const ToleranceConfig& tol) {
  require_hermitian(m, tol);
  const auto eig = hermitian_eig_unchecked(m);
  const double lo = eig.eigenvalues(0);
  const double hi = eig.eigenvalues(eig.eigenvalues.size() - 1);
  if (lo < -tol.psd_tol) {
    throw Error(ErrorCode::NotPSD, "effect has eigenvalue " + std::to_string(lo));
  }
  if (hi > 1.0 + tol.psd_tol) {
    throw Error(ErrorCode::NotPSD, "effect exceeds identity, eigenvalue " + std::to_string(hi));
  }
  return Effect(hermitian_part(m));
}

Effect Effect::assume_valid(CMatrix m) {
  require_square(m);
  return Effect(hermitian_part(m));
}

Effect Effect::clamped() const {
  const auto eig = hermitian_eig_unchecked(matrix_);
  return Effect(apply_spectral(eig, [](double x) { return std::clamp(x, 0.0, 1.0); }));
}

double Effect::clamp_excess() const {
  const auto eig = hermitian_eig_unchecked(matrix_);
  const double lo = eig.eigenvalues(0);
  const double hi = eig.eigenvalues(eig.eigenvalues.size() - 1);
  return std::max({0.0, -lo, hi - 1.0});
}

namespace {

void require_psd(const CMatrix& m, const ToleranceConfig& tol) {
  require_hermitian(m, tol);
  const auto eig = hermitian_eig_unchecked(m);
  if (eig.eigenvalues(0) < -tol.psd_tol) {
    throw Error(ErrorCode::NotPSD, "state has eigenvalue " + std::to_string(eig.eigenvalues(0)));
  }
}

}  // namespace

DensityOperator DensityOperator::from_matrix(CMatrix m, const ToleranceConfig& tol) {
  require_psd(m, tol);
  const double tr = m.trace().real();
  if (std::abs(tr - 1.0) > 1e-10) {
    throw Error(ErrorCode::InvalidInput, "density operator trace " + std::to_string(tr));
  }
  return DensityOperator(hermitian_part(m), false);
}

DensityOperator DensityOperator::sub_normalized(CMatrix m, const ToleranceConfig& tol) {
  require_psd(m, tol);
  const double tr = m.trace().real();
  if (tr < -tol.psd_tol || tr > 1.0 + 1e-10) {
    throw Error(ErrorCode::InvalidInput, "sub-normalized trace " + std::to_string(tr));
  }
  return DensityOperator(hermitian_part(m), true);
}

DensityOperator DensityOperator::assume_valid(CMatrix m, bool sub_normalized) {
  require_square(m);
  return DensityOperator(hermitian_part(m), sub_normalized);
}

DensityOperator DensityOperator::pure(const CVector& psi) {
  const CVector v = psi / psi.norm();
  return DensityOperator(outer(v), false);
}

Projection Projection::from_matrix(CMatrix m, const ToleranceConfig& tol) {
  Effect e = Effect::from_matrix(std::move(m), tol);
  const CMatrix& p = e.matrix();
  const double idem = op_norm((p * p - p).eval());
  if (idem > tol.eq_tol) {
    throw Error(ErrorCode::InvalidInput, "not idempotent, ||P^2 - P|| = " + std::to_string(idem));
  }
  return Projection(std::move(e));
}

Projection Projection::onto(const CVector& v) {
  const CVector u = v / v.norm();
  return Projection(Effect::assume_valid(outer(u)));
}

CMatrix conjugate_by_sqrt(const Effect& a, const CMatrix& b, const ToleranceConfig& tol) {
  require_same_dim(a.matrix(), b);
  const CMatrix root = a.sqrt(tol);
  return root * b * root;
}

Effect standard_seq_product(const Effect& a, const Effect& b, const ToleranceConfig& tol) {
  return Effect::assume_valid(conjugate_by_sqrt(a, b.matrix(), tol));
}

double probability(const DensityOperator& rho, const Effect& a) {
  require_same_dim(rho.matrix(), a.matrix());
  const double p = trace_of_product(rho.matrix(), a.matrix()).real();
  return std::clamp(p, 0.0, 1.0);
}

ConditionedState luders_condition(const DensityOperator& rho, const Effect& a,
                                  const ToleranceConfig& tol) {
  require_same_dim(rho.matrix(), a.matrix());
  const CMatrix unnormalized = hermitian_part(conjugate_by_sqrt(a, rho.matrix(), tol));
  const double p = unnormalized.trace().real();
  if (p <= tol.psd_tol) return ZeroOutcome{std::max(p, 0.0)};
  return DensityOperator::assume_valid(unnormalized / p);
}

bool commutes(const Effect& a, const Effect& b, const ToleranceConfig& tol) {
  require_same_dim(a.matrix(), b.matrix());
  const CMatrix comm = a.matrix() * b.matrix() - b.matrix() * a.matrix();
  return op_norm(comm) <= tol.eq_tol;
}

}  // namespace seqeffect
