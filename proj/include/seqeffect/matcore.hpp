#pragma once

// Dense complex-matrix kernel. Everything here is header-only and templated on
// the Eigen expression type so it works for any std::complex<Real> scalar.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <iostream>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "seqeffect/error.hpp"

namespace seqeffect {

template <typename Real>
using CMatrixT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using CVectorT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using RVectorT = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using Complex = std::complex<double>;
using CMatrix = CMatrixT<double>;
using CVector = CVectorT<double>;
using RVector = RVectorT<double>;

inline constexpr int kMinDim = 2;
inline constexpr int kMaxDim = 16;
inline constexpr int kMaxJacobiSweeps = 100;

/// Numerical tolerances shared by every module.
///
/// hermit_tol bounds ||M - M*||, psd_tol is the eigenvalue floor below which a
/// matrix is not PSD, eq_tol is the operator-norm equality threshold and
/// rank_tol the eigenvalue threshold for numerical rank.
struct ToleranceConfig {
  double hermit_tol = 1e-10;
  double psd_tol = 1e-9;
  double eq_tol = 1e-8;
  double rank_tol = 1e-7;

  /// Throws InvalidTolerance on a non-positive entry. Returns false (and logs)
  /// when psd_tol >= eq_tol, which is allowed but unusual.
  bool validate(std::ostream* warn = &std::clog) const {
    for (double t : {hermit_tol, psd_tol, eq_tol, rank_tol}) {
      if (!(t > 0.0) || !std::isfinite(t)) {
        throw Error(ErrorCode::InvalidTolerance, "tolerances must be finite and strictly positive");
      }
    }
    if (psd_tol >= eq_tol) {
      if (warn != nullptr) {
        *warn << "warning: psd_tol (" << psd_tol << ") >= eq_tol (" << eq_tol << ")\n";
      }
      return false;
    }
    return true;
  }
};

inline void check_dim(int dim) {
  if (dim < kMinDim || dim > kMaxDim) {
    throw Error(ErrorCode::UnsupportedDim,
                "dimension " + std::to_string(dim) + " outside [" + std::to_string(kMinDim) + ", " +
                    std::to_string(kMaxDim) + "]");
  }
}

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::DimMismatch, "matrix is not square");
  }
}

template <typename DerivedA, typename DerivedB>
void require_same_dim(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::DimMismatch, std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                            " vs " + std::to_string(b.rows()) + "x" +
                                            std::to_string(b.cols()));
  }
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
    }
  }
  return true;
}

/// (M + M*) / 2
template <typename Derived>
auto hermitian_part(const Eigen::MatrixBase<Derived>& m) {
  using Real = typename Derived::RealScalar;
  return CMatrixT<Real>((m + m.adjoint()) * Real(0.5));
}

/// Largest singular value.
template <typename Derived>
typename Derived::RealScalar op_norm(const Eigen::MatrixBase<Derived>& m) {
  using Real = typename Derived::RealScalar;
  require_square(m);
  if (m.size() == 0) return Real(0);
  Eigen::JacobiSVD<CMatrixT<Real>> svd(m.eval());
  return svd.singularValues()(0);
}

template <typename Derived>
typename Derived::RealScalar hermiticity_defect(const Eigen::MatrixBase<Derived>& m) {
  return op_norm((m - m.adjoint()).eval());
}

template <typename Real>
struct HermitianEig {
  RVectorT<Real> eigenvalues;   // ascending
  CMatrixT<Real> eigenvectors;  // columns, unitary
  int sweeps = 0;
};

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
/// Skips the Hermiticity check; the input is symmetrized first.
template <typename Derived>
HermitianEig<typename Derived::RealScalar> hermitian_eig_unchecked(
    const Eigen::MatrixBase<Derived>& m) {
  using Real = typename Derived::RealScalar;
  using C = std::complex<Real>;
  require_square(m);
  const Eigen::Index n = m.rows();

  CMatrixT<Real> a = hermitian_part(m);
  for (Eigen::Index i = 0; i < n; ++i) a(i, i) = C(a(i, i).real(), Real(0));
  CMatrixT<Real> v = CMatrixT<Real>::Identity(n, n);

  const Real eps = std::numeric_limits<Real>::epsilon();
  const Real tiny = std::numeric_limits<Real>::min();
  const Real scale = a.norm();

  auto off_diagonal = [&]() {
    Real s = 0;
    for (Eigen::Index q = 0; q < n; ++q)
      for (Eigen::Index p = 0; p < n; ++p)
        if (p != q) s += std::norm(a(p, q));
    return std::sqrt(s);
  };

  int sweep = 0;
  for (; sweep <= kMaxJacobiSweeps; ++sweep) {
    const Real off = off_diagonal();
    if (off <= eps * scale || off == Real(0)) break;
    if (sweep == kMaxJacobiSweeps) {
      throw Error(ErrorCode::NoConvergence,
                  "Jacobi eigensolver did not converge after " + std::to_string(sweep) + " sweeps");
    }
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const C apq = a(p, q);
        const Real mag = std::abs(apq);
        if (mag <= tiny) continue;

        // Phase e^{-i arg(apq)} on column q makes the pivot real, then a real
        // Jacobi rotation annihilates it.
        const C phase = std::conj(apq) / mag;
        const Real theta = (a(q, q).real() - a(p, p).real()) / (Real(2) * mag);
        const Real t = (theta >= 0 ? Real(1) : Real(-1)) /
                       (std::abs(theta) + std::sqrt(theta * theta + Real(1)));
        const Real c = Real(1) / std::sqrt(t * t + Real(1));
        const Real s = t * c;

        const C jpp = c;
        const C jpq = s;
        const C jqp = -s * phase;
        const C jqq = c * phase;

        for (Eigen::Index k = 0; k < n; ++k) {  // a <- a J
          const C akp = a(k, p);
          const C akq = a(k, q);
          a(k, p) = akp * jpp + akq * jqp;
          a(k, q) = akp * jpq + akq * jqq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {  // a <- J* a
          const C apk = a(p, k);
          const C aqk = a(q, k);
          a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
          a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {  // v <- v J
          const C vkp = v(k, p);
          const C vkq = v(k, q);
          v(k, p) = vkp * jpp + vkq * jqp;
          v(k, q) = vkp * jpq + vkq * jqq;
        }
        a(p, q) = C(0);
        a(q, p) = C(0);
        a(p, p) = C(a(p, p).real(), Real(0));
        a(q, q) = C(a(q, q).real(), Real(0));
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index(0));
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return a(i, i).real() < a(j, j).real();
  });

  HermitianEig<Real> out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  out.sweeps = sweep;
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.eigenvalues(k) = a(src, src).real();
    out.eigenvectors.col(k) = v.col(src);
  }
  return out;
}

template <typename Derived>
void require_hermitian(const Eigen::MatrixBase<Derived>& m, const ToleranceConfig& tol) {
  require_square(m);
  if (!all_finite(m)) throw Error(ErrorCode::InvalidInput, "matrix has non-finite entries");
  const double defect = static_cast<double>(hermiticity_defect(m));
  if (defect > tol.hermit_tol) {
    throw Error(ErrorCode::NotHermitian, "||M - M*|| = " + std::to_string(defect));
  }
}

/// Eigendecomposition M = V diag(lambda) V* with lambda ascending.
template <typename Derived>
HermitianEig<typename Derived::RealScalar> hermitian_eig(const Eigen::MatrixBase<Derived>& m,
                                                          const ToleranceConfig& tol = {}) {
  require_hermitian(m, tol);
  return hermitian_eig_unchecked(m);
}

/// V diag(f(lambda)) V*
template <typename Real, typename F>
CMatrixT<Real> apply_spectral(const HermitianEig<Real>& eig, F&& f) {
  const auto& v = eig.eigenvectors;
  CMatrixT<Real> scaled = v;
  for (Eigen::Index k = 0; k < v.cols(); ++k) scaled.col(k) *= f(eig.eigenvalues(k));
  return hermitian_part(scaled * v.adjoint());
}

/// Functional calculus f(M) for Hermitian M.
template <typename Derived, typename F>
auto matrix_function(const Eigen::MatrixBase<Derived>& m, F&& f, const ToleranceConfig& tol = {}) {
  return apply_spectral(hermitian_eig(m, tol), std::forward<F>(f));
}

/// The unique PSD square root. Eigenvalues in [-psd_tol, 0) are clamped to 0.
template <typename Derived>
auto sqrt_psd(const Eigen::MatrixBase<Derived>& m, const ToleranceConfig& tol = {}) {
  using Real = typename Derived::RealScalar;
  const auto eig = hermitian_eig(m, tol);
  if (eig.eigenvalues.size() > 0 && eig.eigenvalues(0) < -Real(tol.psd_tol)) {
    throw Error(ErrorCode::NotPSD,
                "smallest eigenvalue " + std::to_string(static_cast<double>(eig.eigenvalues(0))));
  }
  return apply_spectral(eig, [](Real x) { return std::sqrt(std::max(x, Real(0))); });
}

template <typename Real>
struct PolarDecomposition {
  CMatrixT<Real> isometry;  // U, completed to a unitary on ker(P)
  CMatrixT<Real> modulus;   // P = (C* C)^{1/2}
};

/// C = U P with P = |C| and U unitary (hence a partial isometry on range(P)).
template <typename Derived>
PolarDecomposition<typename Derived::RealScalar> polar_decompose(
    const Eigen::MatrixBase<Derived>& c) {
  using Real = typename Derived::RealScalar;
  require_square(c);
  if (!all_finite(c)) throw Error(ErrorCode::InvalidInput, "matrix has non-finite entries");
  Eigen::JacobiSVD<CMatrixT<Real>> svd(c.eval(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const CMatrixT<Real>& w = svd.matrixU();
  const CMatrixT<Real>& x = svd.matrixV();
  CMatrixT<Real> xs = x;
  for (Eigen::Index k = 0; k < x.cols(); ++k) xs.col(k) *= svd.singularValues()(k);
  PolarDecomposition<Real> out;
  out.isometry = w * x.adjoint();
  out.modulus = hermitian_part(xs * x.adjoint());
  return out;
}

/// Count of eigenvalues above rank_tol for a Hermitian PSD matrix.
template <typename Derived>
int numerical_rank(const Eigen::MatrixBase<Derived>& m, const ToleranceConfig& tol = {}) {
  using Real = typename Derived::RealScalar;
  const auto eig = hermitian_eig(m, tol);
  if (eig.eigenvalues.size() > 0 && eig.eigenvalues(0) < -Real(tol.psd_tol)) {
    throw Error(ErrorCode::NotPSD,
                "smallest eigenvalue " + std::to_string(static_cast<double>(eig.eigenvalues(0))));
  }
  int rank = 0;
  for (Eigen::Index k = 0; k < eig.eigenvalues.size(); ++k) {
    if (eig.eigenvalues(k) > Real(tol.rank_tol)) ++rank;
  }
  return rank;
}

template <typename Derived>
std::complex<typename Derived::RealScalar> trace(const Eigen::MatrixBase<Derived>& m) {
  return m.trace();
}

/// Tr(X Y) without forming the product.
template <typename DerivedA, typename DerivedB>
std::complex<typename DerivedA::RealScalar> trace_of_product(const Eigen::MatrixBase<DerivedA>& x,
                                                             const Eigen::MatrixBase<DerivedB>& y) {
  require_square(x);
  require_same_dim(x, y);
  return x.cwiseProduct(y.transpose()).sum();
}

inline CMatrix identity(int dim) { return CMatrix::Identity(dim, dim); }
inline CMatrix zero(int dim) { return CMatrix::Zero(dim, dim); }

/// |v><v|
template <typename Derived>
auto outer(const Eigen::MatrixBase<Derived>& v) {
  using Real = typename Derived::RealScalar;
  return CMatrixT<Real>(v * v.adjoint());
}

}  // namespace seqeffect
