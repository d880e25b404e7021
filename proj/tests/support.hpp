#pragma once

// Independent reference computations for the tests. These go through Eigen's
// own solvers rather than the library's Jacobi kernel.

#include <Eigen/Dense>

#include "seqeffect/matcore.hpp"
#include "seqeffect/random.hpp"

namespace seqeffect::testing {

inline double dist(const CMatrix& a, const CMatrix& b) { return op_norm((a - b).eval()); }

inline RVector oracle_eigenvalues(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  return es.eigenvalues();
}

inline CMatrix oracle_sqrt(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  RVector s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

/// Largest singular value from the eigenvalues of M*M.
inline double oracle_op_norm(const CMatrix& m) {
  const CMatrix g = m.adjoint() * m;
  return std::sqrt(std::max(0.0, oracle_eigenvalues(g).maxCoeff()));
}

inline CVector basis(int dim, int k) {
  CVector v = CVector::Zero(dim);
  v(k) = 1.0;
  return v;
}

inline CVector plus() { return CVector::Constant(2, Complex(1.0 / std::sqrt(2.0), 0.0)); }

inline CMatrix proj(const CVector& v) { return v * v.adjoint(); }

inline CMatrix diag(std::initializer_list<double> xs) {
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) m(k, k) = x, ++k;
  return m;
}

/// Effect with spectrum in [lo, 1], hence invertible for lo > 0.
inline CMatrix random_invertible_effect(int dim, SplitMix64& rng, double lo = 0.05) {
  const CMatrix v = random_unitary(dim, rng);
  RVector u(dim);
  for (int k = 0; k < dim; ++k) u(k) = rng.uniform(lo, 1.0);
  return v * u.cast<Complex>().asDiagonal() * v.adjoint();
}

}  // namespace seqeffect::testing
