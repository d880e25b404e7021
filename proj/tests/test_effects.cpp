#include <doctest.h>

#include "seqeffect/effects.hpp"
#include "support.hpp"

using namespace seqeffect;
using namespace seqeffect::testing;

namespace {

Effect eff(const CMatrix& m) { return Effect::from_matrix(m); }

const CMatrix& p0() {
  static const CMatrix m = proj(basis(2, 0));
  return m;
}
const CMatrix& pplus() {
  static const CMatrix m = proj(plus());
  return m;
}

}  // namespace

TEST_CASE("Effect validation") {
  CHECK_NOTHROW(eff(diag({0.0, 1.0})));
  CHECK_NOTHROW(eff(diag({-1e-10, 1.0 + 1e-10})));
  for (const CMatrix& bad : {diag({-1e-3, 0.5}), diag({0.5, 1.01})}) {
    try {
      eff(bad);
      FAIL("expected NotPSD");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotPSD);
    }
  }
  CMatrix nh(2, 2);
  nh << 0.5, 0.1, 0.0, 0.5;
  try {
    eff(nh);
    FAIL("expected NotHermitian");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotHermitian);
  }
  CHECK(eff(diag({-1e-10, 1.0 + 1e-10})).clamp_excess() == doctest::Approx(1e-10).epsilon(0.01));
  CHECK(eff(diag({-1e-10, 1.0})).clamped().clamp_excess() < 1e-15);
}

TEST_CASE("DensityOperator validation") {
  CHECK_NOTHROW(DensityOperator::from_matrix(diag({0.5, 0.5})));
  CHECK_THROWS_AS(DensityOperator::from_matrix(diag({0.5, 0.4})), Error);
  CHECK(DensityOperator::sub_normalized(diag({0.5, 0.4})).is_sub_normalized());
  CHECK_THROWS_AS(DensityOperator::sub_normalized(diag({0.7, 0.4})), Error);
  CHECK_THROWS_AS(DensityOperator::from_matrix(diag({1.5, -0.5})), Error);
  CHECK(dist(DensityOperator::pure(CVector::Constant(2, 1.0)).matrix(), pplus()) < 1e-15);
}

TEST_CASE("Projection validation") {
  CHECK_NOTHROW(Projection::from_matrix(p0()));
  CHECK_THROWS_AS(Projection::from_matrix(diag({0.5, 1.0})), Error);
  CHECK(dist(Projection::onto(CVector::Constant(2, 3.0)).matrix(), pplus()) < 1e-15);
}

TEST_CASE("standard product examples") {
  SplitMix64 rng(1);
  const Effect b = eff(random_effect(3, rng));
  CHECK(dist(standard_seq_product(Effect::identity(3), b).matrix(), b.matrix()) < 1e-14);
  CHECK(dist(standard_seq_product(eff(p0()), eff(pplus())).matrix(), 0.5 * p0()) < 1e-14);
  CHECK(op_norm(standard_seq_product(b, Effect::zero(3)).matrix()) == 0.0);
}

TEST_CASE("standard product matches the oracle and stays an effect") {
  SplitMix64 rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    const int d = 2 + static_cast<int>(rng.index(7));
    const Effect a = eff(random_effect(d, rng));
    const Effect b = eff(random_effect(d, rng));
    const CMatrix r = oracle_sqrt(a.matrix());
    const CMatrix got = standard_seq_product(a, b).matrix();
    REQUIRE(dist(got, r * b.matrix() * r) < 1e-9);
    const RVector ev = oracle_eigenvalues(got);
    CHECK(ev.minCoeff() >= -1e-12);
    CHECK(ev.maxCoeff() <= 1.0 + 1e-12);
  }
}

TEST_CASE("standard product is additive and homogeneous in the second argument") {
  SplitMix64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + static_cast<int>(rng.index(4));
    const Effect a = eff(random_effect(d, rng));
    const CMatrix b = random_effect(d, rng);
    const CMatrix c = random_effect(d, rng);
    const double lam = rng.uniform();
    const CMatrix lhs = conjugate_by_sqrt(a, (0.5 * b + 0.5 * c).eval());
    const CMatrix rhs = 0.5 * conjugate_by_sqrt(a, b) + 0.5 * conjugate_by_sqrt(a, c);
    CHECK(dist(lhs, rhs) < 1e-12);
    CHECK(dist(conjugate_by_sqrt(a, (lam * b).eval()), lam * conjugate_by_sqrt(a, b)) < 1e-12);
  }
}

TEST_CASE("commuting effects multiply like matrices") {
  SplitMix64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + static_cast<int>(rng.index(5));
    const CMatrix h = random_effect(d, rng);
    // f(t) = 0.3 t + 0.5 t^2 and g(t) = 0.2 + 0.7 t^3 map [0, 1] into [0, 1].
    const Effect a = eff(0.3 * h + 0.5 * h * h);
    const Effect b = eff(0.2 * identity(d) + 0.7 * h * h * h);
    REQUIRE(commutes(a, b));
    CHECK(dist(standard_seq_product(a, b).matrix(), a.matrix() * b.matrix()) <= 1e-8);
    CHECK(dist(standard_seq_product(a, b).matrix(), standard_seq_product(b, a).matrix()) <= 1e-8);
  }
}

TEST_CASE("probability examples") {
  SplitMix64 rng(5);
  const auto rho = DensityOperator::from_matrix(random_density(3, rng));
  CHECK(probability(rho, Effect::identity(3)) == doctest::Approx(1.0));
  CHECK(probability(rho, Effect::zero(3)) == 0.0);
  CHECK(probability(DensityOperator::from_matrix(p0()), eff(pplus())) == doctest::Approx(0.5));
}

TEST_CASE("Lueders conditioning examples") {
  SplitMix64 rng(6);
  const auto rho = DensityOperator::from_matrix(random_density(3, rng));
  auto out = luders_condition(rho, Effect::identity(3));
  REQUIRE_FALSE(is_zero_outcome(out));
  CHECK(dist(std::get<DensityOperator>(out).matrix(), rho.matrix()) < 1e-12);

  out = luders_condition(DensityOperator::from_matrix(pplus()), eff(p0()));
  REQUIRE_FALSE(is_zero_outcome(out));
  CHECK(dist(std::get<DensityOperator>(out).matrix(), p0()) < 1e-12);

  out = luders_condition(DensityOperator::from_matrix(p0()), eff(proj(basis(2, 1))));
  REQUIRE(is_zero_outcome(out));
  CHECK(std::get<ZeroOutcome>(out).probability == 0.0);
}

TEST_CASE("Lueders conditioning yields a unit-trace state") {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + static_cast<int>(rng.index(5));
    const auto rho = DensityOperator::from_matrix(random_density(d, rng));
    const Effect a = eff(random_effect(d, rng));
    const auto out = luders_condition(rho, a);
    if (is_zero_outcome(out)) continue;
    const CMatrix& s = std::get<DensityOperator>(out).matrix();
    CHECK(std::abs(s.trace().real() - 1.0) < 1e-10);
    CHECK(oracle_eigenvalues(s).minCoeff() > -1e-10);
  }
}

TEST_CASE("commutes examples") {
  SplitMix64 rng(8);
  const Effect a = eff(random_effect(3, rng));
  CHECK(commutes(a, Effect::identity(3)));
  CHECK(commutes(a, eff(a.matrix() * a.matrix())));
  CHECK_FALSE(commutes(eff(p0()), eff(pplus())));
}
