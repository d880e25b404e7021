#pragma once

// Seeded generators for effects, states and Haar unitaries.
//
// The bit stream is SplitMix64; Gaussians come from Box-Muller in pairs.
// Ginibre matrices are filled row by row, real part before imaginary part,
// so any implementation of the same generator reproduces the same matrices.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include "seqeffect/matcore.hpp"

namespace seqeffect {

struct RngSeed {
  std::uint64_t value = 0;
};

class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  explicit SplitMix64(RngSeed seed) : state_(seed.value) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
  }

  /// Index in [0, n).
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream seed for (seed, stream, index), e.g. one per trial.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::uint64_t h = mix64(seed + 0x9e3779b97f4a7c15ULL);
  h = mix64(h ^ (stream * 0xd1b54a32d192ed03ULL + 0x632be59bd9b4e019ULL));
  h = mix64(h ^ (index * 0x8cb92ba72f3d8dd7ULL + 0x2545f4914f6cdd1dULL));
  return h;
}

/// Complex Ginibre matrix, entries (x + iy)/sqrt(2) with x, y ~ N(0, 1).
inline CMatrix random_ginibre(int rows, int cols, SplitMix64& rng) {
  CMatrix g(rows, cols);
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const double re = rng.normal();
      const double im = rng.normal();
      g(i, j) = Complex(re * s, im * s);
    }
  }
  return g;
}

/// Haar unitary: QR of a Ginibre matrix with the phases of diag(R) divided out.
inline CMatrix random_unitary(int dim, SplitMix64& rng) {
  check_dim(dim);
  const CMatrix z = random_ginibre(dim, dim, rng);
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ();
  const CMatrix& r = qr.matrixQR();
  for (int k = 0; k < dim; ++k) {
    const double mag = std::abs(r(k, k));
    const Complex ph = mag > 0.0 ? r(k, k) / mag : Complex(1.0);
    q.col(k) *= ph;
  }
  return q;
}

/// Haar-random unit vector.
inline CVector random_unit_vector(int dim, SplitMix64& rng) {
  check_dim(dim);
  CVector v = random_ginibre(dim, 1, rng).col(0);
  return v / v.norm();
}

/// V diag(u) V* with V Haar and u_i ~ U[0, 1].
inline CMatrix random_effect(int dim, SplitMix64& rng) {
  const CMatrix v = random_unitary(dim, rng);
  RVector u(dim);
  for (int k = 0; k < dim; ++k) u(k) = rng.uniform();
  return hermitian_part(v * u.cast<Complex>().asDiagonal() * v.adjoint());
}

/// G G* / Tr(G G*) for Ginibre G.
inline CMatrix random_density(int dim, SplitMix64& rng) {
  check_dim(dim);
  const CMatrix g = random_ginibre(dim, dim, rng);
  CMatrix rho = hermitian_part(g * g.adjoint());
  rho /= rho.trace().real();
  return rho;
}

inline CMatrix random_rank1_projection(int dim, SplitMix64& rng) {
  return outer(random_unit_vector(dim, rng));
}

/// Hermitian matrix V diag(x) V* with x_i ~ U[lo, hi].
inline CMatrix random_hermitian(int dim, SplitMix64& rng, double lo = -1.0, double hi = 1.0) {
  const CMatrix v = random_unitary(dim, rng);
  RVector x(dim);
  for (int k = 0; k < dim; ++k) x(k) = rng.uniform(lo, hi);
  return hermitian_part(v * x.cast<Complex>().asDiagonal() * v.adjoint());
}

inline CMatrix random_effect(int dim, RngSeed seed) {
  SplitMix64 rng(seed);
  return random_effect(dim, rng);
}
inline CMatrix random_density(int dim, RngSeed seed) {
  SplitMix64 rng(seed);
  return random_density(dim, rng);
}
inline CMatrix random_unitary(int dim, RngSeed seed) {
  SplitMix64 rng(seed);
  return random_unitary(dim, rng);
}
inline CMatrix random_rank1_projection(int dim, RngSeed seed) {
  SplitMix64 rng(seed);
  return random_rank1_projection(dim, rng);
}

}  // namespace seqeffect
