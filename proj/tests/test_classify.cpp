#include <doctest.h>

#include "seqeffect/classify.hpp"
#include "support.hpp"

using namespace seqeffect;
using namespace seqeffect::testing;

namespace {

/// Choi matrix built straight from the index convention, one entry at a time.
CMatrix choi_by_definition(int d, const std::function<CMatrix(const CMatrix&)>& map) {
  CMatrix j = CMatrix::Zero(d * d, d * d);
  for (int r = 0; r < d; ++r) {
    for (int k = 0; k < d; ++k) {
      CMatrix e = CMatrix::Zero(d, d);
      e(r, k) = 1.0;
      const CMatrix img = map(e);
      for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) j(a * d + r, b * d + k) = img(a, b);
      }
    }
  }
  return j;
}

}  // namespace

TEST_CASE("Choi of the identity map is the unnormalized maximally entangled projector") {
  const auto s = superoperator_from_product(CandidateProduct::standard(), Effect::identity(2));
  CVector omega = CVector::Zero(4);
  omega(0) = omega(3) = 1.0;  // sum_j e_j (x) e_j
  CHECK(dist(s.choi(), omega * omega.adjoint()) < 1e-12);
}

TEST_CASE("Choi of conjugation by a projection has rank one") {
  const CMatrix p0 = proj(basis(2, 0));
  const auto s = superoperator_from_product(CandidateProduct::standard(), Effect::from_matrix(p0));
  CVector vec = CVector::Zero(4);
  vec(0) = 1.0;  // x(a*d + j) = P0(a, j)
  CHECK(dist(s.choi(), vec * vec.adjoint()) < 1e-12);
  CHECK(numerical_rank(s.choi()) == 1);
}

TEST_CASE("zero effect gives the zero superoperator") {
  const auto s = superoperator_from_product(CandidateProduct::standard(), Effect::zero(3));
  CHECK(op_norm(s.choi()) < 1e-14);
}

TEST_CASE("superoperator matches the defining Choi convention") {
  SplitMix64 rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 2 + static_cast<int>(rng.index(3));
    const CMatrix c = random_ginibre(d, d, rng);
    auto map = [&](const CMatrix& x) -> CMatrix { return c.adjoint() * x * c; };
    const auto s = Superoperator::from_linear_map(d, map);
    REQUIRE(dist(s.choi(), choi_by_definition(d, map)) < 1e-13);
    const CMatrix x = random_ginibre(d, d, rng);
    CHECK(dist(s.apply(x), map(x)) < 1e-12);
    auto tmap = [&](const CMatrix& y) -> CMatrix { return map(y.transpose()); };
    CHECK(dist(s.choi_of_transpose_composition(), choi_by_definition(d, tmap)) < 1e-13);
    CHECK(s.distance(Superoperator::from_linear_map(d, tmap)) > 1e-3);
  }
}

TEST_CASE("non-affine products are rejected") {
  CandidateProduct squared{"squared", [](const Effect& a, const Effect& b) -> CMatrix {
                             return a.matrix() * b.matrix() * b.matrix() * a.matrix();
                           }};
  SplitMix64 rng(2);
  try {
    superoperator_from_product(squared, Effect::from_matrix(random_effect(2, rng)));
    FAIL("expected NotAffine");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotAffine);
  }
}

TEST_CASE("standard product classifies as a conjugation with C*C = A") {
  SplitMix64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + static_cast<int>(rng.index(3));
    const Effect a = Effect::from_matrix(random_invertible_effect(d, rng));
    const auto cls = classify_pure_positive(superoperator_from_product(CandidateProduct::standard(), a));
    REQUIRE(cls.form == PureMapForm::Conjugation);
    REQUIRE(cls.c.has_value());
    CHECK(dist(cls.c->adjoint() * *cls.c, a.matrix()) <= 1e-8);
    CHECK(cls.residual <= 1e-8);
  }
}

TEST_CASE("transpose-twisted product classifies as an anti-conjugation") {
  SplitMix64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + static_cast<int>(rng.index(3));
    const Effect a = Effect::from_matrix(random_invertible_effect(d, rng));
    const auto s = superoperator_from_product(CandidateProduct::transpose_twisted(), a);
    const auto cls = classify_pure_positive(s);
    REQUIRE(cls.form == PureMapForm::AntiConjugation);
    CHECK(numerical_rank(s.choi_of_transpose_composition()) == 1);
    const CMatrix& c = *cls.c;
    const CMatrix x = random_effect(d, rng);
    CHECK(dist(s.apply(x), c.adjoint() * x.transpose() * c) < 1e-8);
  }
}

TEST_CASE("trace-times-state map classifies as rank-one output") {
  const auto s = Superoperator::from_linear_map(2, [](const CMatrix& x) -> CMatrix {
    return x.trace() * proj(basis(2, 0));
  });
  const auto cls = classify_pure_positive(s);
  REQUIRE(cls.form == PureMapForm::RankOneOutput);
  REQUIRE(cls.b_op.has_value());
  REQUIRE(cls.psi.has_value());
  CHECK(dist(*cls.b_op, identity(2)) < 1e-10);
  CHECK(std::abs(std::abs((*cls.psi)(0)) - 1.0) < 1e-10);
}

TEST_CASE("Jordan product is unclassified") {
  SplitMix64 rng(5);
  const Effect a = Effect::from_matrix(random_invertible_effect(2, rng));
  const auto cls = classify_pure_positive(superoperator_from_product(CandidateProduct::jordan(), a));
  CHECK(cls.form == PureMapForm::Unclassified);
  CHECK_FALSE(cls.note.empty());
}

TEST_CASE("proof trace passes for the standard product") {
  const Effect a = Effect::from_matrix(diag({0.5, 0.9}));
  const auto rep = trace_theorem_steps(CandidateProduct::standard(), a);
  CHECK(rep.all_passed());
  CHECK(rep.first_failure() == nullptr);
  CHECK(rep.form == PureMapForm::Conjugation);
  REQUIRE(rep.mu.has_value());
  CHECK(std::abs(std::abs(*rep.mu) - 1.0) <= 1e-8);
  REQUIRE(rep.isometry.has_value());
  const CMatrix u2 = *rep.isometry * *rep.isometry;
  CHECK(dist(u2, *rep.mu * identity(2)) <= 1e-8);
  CHECK(rep.steps.back().name == "final_identity");
  CHECK(rep.steps.back().residual <= 1e-8);
  CHECK(dist(*rep.c, oracle_sqrt(a.matrix())) <= 1e-8);

  const auto id_rep = trace_theorem_steps(CandidateProduct::standard(), Effect::identity(3));
  CHECK(id_rep.all_passed());
  CHECK(dist(*id_rep.c, identity(3)) < 1e-10);
}

TEST_CASE("proof trace pinpoints a failing step for a twisted unitary") {
  // U0 = diag(1, 1, i) has U0^2 = diag(1, 1, -1), not a scalar.
  CMatrix u0 = identity(3);
  u0(2, 2) = Complex(0, 1);
  SplitMix64 rng(6);
  const Effect a = Effect::from_matrix(random_invertible_effect(3, rng));
  const auto rep = trace_theorem_steps(CandidateProduct::unitary_twisted(u0), a);
  CHECK_FALSE(rep.all_passed());
  REQUIRE(rep.first_failure() != nullptr);
  CHECK(rep.first_failure()->name == "unit_probe");
}

TEST_CASE("proof trace preconditions") {
  try {
    trace_theorem_steps(CandidateProduct::standard(), Effect::from_matrix(diag({1.0, 0.0})));
    FAIL("expected NotInvertible");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotInvertible);
  }
  SplitMix64 rng(7);
  const Effect a = Effect::from_matrix(random_invertible_effect(2, rng));
  try {
    trace_theorem_steps(CandidateProduct::jordan(), a);
    FAIL("expected UnclassifiedMap");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnclassifiedMap);
  }
}

TEST_CASE("regularization examples") {
  CHECK(dist(regularize_invertible(Effect::zero(2), 1).matrix(), 0.5 * identity(2)) < 1e-15);
  CHECK(dist(regularize_invertible(Effect::identity(3), 7).matrix(), identity(3)) < 1e-15);
  CHECK(dist(regularize_invertible(Effect::from_matrix(diag({1.0, 0.0})), 4).matrix(),
             diag({1.0, 0.2})) < 1e-15);
  CHECK_THROWS_AS(regularize_invertible(Effect::identity(2), 0), Error);
}

TEST_CASE("regularization converges and makes the trace applicable") {
  SplitMix64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const Effect a = Effect::from_matrix(random_effect(3, rng));
    CHECK(dist(regularize_invertible(a, 1000000).matrix(), a.matrix()) < 1e-5);
  }
  const Effect singular = Effect::from_matrix(proj(basis(3, 1)));
  const auto rep = trace_theorem_steps(CandidateProduct::standard(), regularize_invertible(singular, 10));
  CHECK(rep.all_passed());
}

TEST_CASE("proof trace rules out a rank-one-output product") {
  const CandidateProduct collapse{"collapse", [](const Effect& a, const Effect& b) -> CMatrix {
                                    return trace_of_product(a.matrix(), b.matrix()) * proj(basis(a.dim(), 0));
                                  }};
  SplitMix64 rng(9);
  const Effect a = Effect::from_matrix(random_invertible_effect(3, rng));
  const auto rep = trace_theorem_steps(collapse, a);
  CHECK(rep.form == PureMapForm::RankOneOutput);
  CHECK_FALSE(rep.all_passed());
  auto find = [&](const std::string& name) {
    return *std::find_if(rep.steps.begin(), rep.steps.end(), [&](const ProofStep& s) { return s.name == name; });
  };
  CHECK(find("rank_one_b_equals_a").passed);
  CHECK_FALSE(find("rank_one_unit_output").passed);
}
