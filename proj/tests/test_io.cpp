#include <doctest.h>

#include "seqeffect/io.hpp"
#include "support.hpp"

using namespace seqeffect;
using namespace seqeffect::testing;
using seqeffect::io::Json;

namespace {

ErrorCode code_of(const std::string& text) {
  try {
    io::matrix_from_json(Json::parse(text));
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a parse failure for " << text);
  return ErrorCode::InvalidInput;
}

}  // namespace

TEST_CASE("matrix JSON round trip") {
  SplitMix64 rng(1);
  const CMatrix m = random_ginibre(3, 3, rng);
  const Json j = io::matrix_to_json(m);
  CHECK(j["dim"] == 3);
  CHECK(j["entries"][1][2][0].get<double>() == m(1, 2).real());
  CHECK(j["entries"][1][2][1].get<double>() == m(1, 2).imag());
  CHECK(io::matrix_from_json(Json::parse(j.dump())) == m);
}

TEST_CASE("matrix JSON is row major") {
  const CMatrix m = io::matrix_from_json(Json::parse(R"({"dim": 2, "entries": [[[1,0],[2,0]],[[3,0],[4,-1]]]})"));
  CHECK(m(0, 1) == Complex(2, 0));
  CHECK(m(1, 0) == Complex(3, 0));
  CHECK(m(1, 1) == Complex(4, -1));
}

TEST_CASE("malformed matrices are rejected") {
  CHECK(code_of(R"({"dim": 2, "entries": [[[1,0],[0,0]],[[0,0]]]})") == ErrorCode::InvalidInput);
  CHECK(code_of(R"({"dim": 2, "entries": [[[1,0],[0,0]]]})") == ErrorCode::InvalidInput);
  CHECK(code_of(R"({"dim": 2, "entries": [[1,0],[0,1]]})") == ErrorCode::InvalidInput);
  CHECK(code_of(R"({"dim": 2, "entries": [[[1,0,0],[0,0]],[[0,0],[1,0]]]})") == ErrorCode::InvalidInput);
  CHECK(code_of(R"({"entries": []})") == ErrorCode::InvalidInput);
  CHECK(code_of(R"([1, 2])") == ErrorCode::InvalidInput);
  CHECK(code_of(R"({"dim": 1.5, "entries": []})") == ErrorCode::InvalidInput);
}

TEST_CASE("POVM JSON") {
  const std::vector<CMatrix> effects{proj(basis(2, 0)), proj(basis(2, 1))};
  const auto back = io::povm_from_json(Json::parse(io::povm_to_json(effects).dump()));
  REQUIRE(back.size() == 2);
  CHECK(back[1] == effects[1]);
  CHECK_THROWS_AS(io::povm_from_json(Json::parse(R"({"effects": []})")), Error);
  CHECK_THROWS_AS(io::povm_from_json(Json::parse(R"({"other": 1})")), Error);
}

TEST_CASE("witness JSON keeps scalars and non-finite residuals") {
  ViolationWitness w;
  w.condition = ConditionId::Affinity;
  w.dim = 2;
  w.trial = 17;
  w.residual = std::numeric_limits<double>::infinity();
  w.inputs.set("A", identity(2));
  w.inputs.set("lambda", 0.25);
  const Json j = io::to_json(w);
  CHECK(j["residual"] == "inf");
  const auto back = io::witness_from_json(Json::parse(j.dump()));
  CHECK(back.condition == ConditionId::Affinity);
  CHECK(back.trial == 17);
  CHECK(std::isinf(back.residual));
  CHECK(back.inputs.scalar("lambda") == 0.25);
  CHECK(back.inputs.matrix("A") == identity(2));
  CHECK_THROWS_AS(back.inputs.matrix("B"), std::out_of_range);
}

TEST_CASE("reports serialize the fields consumers rely on") {
  const auto fuzz = fuzz_candidate(CandidateProduct::jordan(), {2}, 100, 42);
  const Json j = io::to_json(fuzz);
  CHECK(j["candidate"] == "jordan");
  CHECK(j["reports"].size() == std::size(kAllConditions));
  CHECK(j["failed_conditions"].is_array());
  CHECK(j["reports"][0].contains("argmax_trial"));
  CHECK(j["reports"][0].contains("witness"));

  const auto rep = trace_theorem_steps(CandidateProduct::standard(), Effect::from_matrix(diag({0.5, 0.9})));
  const Json t = io::to_json(rep);
  CHECK(t["form"] == "CONJUGATION");
  CHECK(t["first_failing_step"].is_null());
  CHECK(t["abs_mu"].get<double>() == doctest::Approx(1.0));
  CHECK(t["steps"].size() == rep.steps.size());
}
