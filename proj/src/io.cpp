#include "seqeffect/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace seqeffect::io {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidInput, what); }

Json number(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

double read_number(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  bad("expected a number");
}

}  // namespace

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json matrix_to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  Json out;
  out["dim"] = m.rows();
  out["entries"] = std::move(rows);
  return out;
}

CMatrix matrix_from_json(const Json& j) {
  if (!j.is_object()) bad("matrix must be an object");
  if (!j.contains("dim") || !j["dim"].is_number_integer()) bad("matrix needs an integer 'dim'");
  if (!j.contains("entries") || !j["entries"].is_array()) bad("matrix needs an 'entries' array");
  const auto dim = j["dim"].get<long long>();
  if (dim < 1 || dim > 4096) bad("matrix 'dim' out of range");
  const Json& rows = j["entries"];
  if (static_cast<long long>(rows.size()) != dim) bad("matrix has " + std::to_string(rows.size()) + " rows, dim is " + std::to_string(dim));
  CMatrix m(dim, dim);
  for (long long i = 0; i < dim; ++i) {
    const Json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<long long>(row.size()) != dim) {
      bad("ragged row " + std::to_string(i));
    }
    for (long long k = 0; k < dim; ++k) {
      const Json& z = row[static_cast<std::size_t>(k)];
      if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number()) {
        bad("entry (" + std::to_string(i) + ", " + std::to_string(k) + ") must be [re, im]");
      }
      const double re = z[0].get<double>();
      const double im = z[1].get<double>();
      if (!std::isfinite(re) || !std::isfinite(im)) bad("non-finite entry");
      m(i, k) = Complex(re, im);
    }
  }
  return m;
}

Json vector_to_json(const CVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

std::vector<CMatrix> povm_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("effects") || !j["effects"].is_array()) {
    bad("POVM must be {\"effects\": [...]}");
  }
  std::vector<CMatrix> out;
  for (const auto& e : j["effects"]) out.push_back(matrix_from_json(e));
  if (out.empty()) bad("POVM has no effects");
  return out;
}

Json povm_to_json(const std::vector<CMatrix>& effects) {
  Json arr = Json::array();
  for (const auto& e : effects) arr.push_back(matrix_to_json(e));
  Json out;
  out["effects"] = std::move(arr);
  return out;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    bad(path.string() + ": " + e.what());
  }
}

CMatrix read_matrix_file(const std::filesystem::path& path) {
  return matrix_from_json(read_json_file(path));
}

Json to_json(const ToleranceConfig& tol) {
  Json out;
  out["hermit_tol"] = tol.hermit_tol;
  out["psd_tol"] = tol.psd_tol;
  out["eq_tol"] = tol.eq_tol;
  out["rank_tol"] = tol.rank_tol;
  return out;
}

Json to_json(const TrialInputs& in) {
  Json out;
  Json mats = Json::object();
  for (const auto& [name, m] : in.matrices) mats[name] = matrix_to_json(m);
  Json scalars = Json::object();
  for (const auto& [name, x] : in.scalars) scalars[name] = x;
  out["matrices"] = std::move(mats);
  out["scalars"] = std::move(scalars);
  return out;
}

Json to_json(const ViolationWitness& w) {
  Json out;
  out["condition"] = to_string(w.condition);
  out["dim"] = w.dim;
  out["trial"] = w.trial;
  out["residual"] = number(w.residual);
  out["inputs"] = to_json(w.inputs);
  return out;
}

ViolationWitness witness_from_json(const Json& j) {
  ViolationWitness w;
  const auto id = condition_from_string(j.at("condition").get<std::string>());
  if (!id) bad("unknown condition");
  w.condition = *id;
  w.dim = j.at("dim").get<int>();
  w.trial = j.at("trial").get<std::size_t>();
  w.residual = read_number(j.at("residual"));
  for (const auto& [name, m] : j.at("inputs").at("matrices").items()) {
    w.inputs.set(name, matrix_from_json(m));
  }
  for (const auto& [name, x] : j.at("inputs").at("scalars").items()) {
    w.inputs.set(name, x.get<double>());
  }
  return w;
}

Json to_json(const ConditionReport& r) {
  Json out;
  out["condition"] = to_string(r.condition);
  out["dim"] = r.dim;
  out["passed"] = r.passed;
  out["max_residual"] = number(r.max_residual);
  out["tolerance"] = r.tolerance;
  out["trials"] = r.trials;
  out["evaluated"] = r.evaluated;
  out["skipped"] = r.skipped;
  out["closure_failures"] = r.closure_failures;
  out["argmax_trial"] = r.argmax_trial ? Json(*r.argmax_trial) : Json(nullptr);
  out["witness"] = r.witness ? to_json(*r.witness) : Json(nullptr);
  return out;
}

Json to_json(const FuzzReport& r) {
  Json out;
  out["candidate"] = r.candidate;
  out["dims"] = r.dims;
  out["trials_per_condition"] = r.trials_per_condition;
  out["seed"] = r.seed;
  out["all_passed"] = r.all_passed();
  Json failed = Json::array();
  for (ConditionId id : r.failed_conditions()) failed.push_back(to_string(id));
  out["failed_conditions"] = std::move(failed);
  out["max_deviation_from_standard"] = number(r.max_deviation_from_standard);
  out["flags"] = r.theorem_tension ? Json::array({"THEOREM_TENSION"}) : Json::array();
  Json reports = Json::array();
  for (const auto& c : r.reports) reports.push_back(to_json(c));
  out["reports"] = std::move(reports);
  return out;
}

Json to_json(const PureMapClassification& c) {
  Json out;
  out["form"] = to_string(c.form);
  out["residual"] = number(c.residual);
  if (c.c) out["C"] = matrix_to_json(*c.c);
  if (c.b_op) out["B"] = matrix_to_json(*c.b_op);
  if (c.psi) out["psi"] = vector_to_json(*c.psi);
  if (!c.note.empty()) out["note"] = c.note;
  return out;
}

Json to_json(const ProofTraceReport& r) {
  Json out;
  out["candidate"] = r.candidate;
  out["form"] = to_string(r.form);
  out["all_passed"] = r.all_passed();
  const ProofStep* first = r.first_failure();
  out["first_failing_step"] = first ? Json(first->name) : Json(nullptr);
  Json steps = Json::array();
  for (const auto& s : r.steps) {
    Json j;
    j["name"] = s.name;
    j["residual"] = number(s.residual);
    j["passed"] = s.passed;
    steps.push_back(std::move(j));
  }
  out["steps"] = std::move(steps);
  out["A"] = matrix_to_json(r.a);
  if (r.c) out["C"] = matrix_to_json(*r.c);
  if (r.isometry) out["U"] = matrix_to_json(*r.isometry);
  if (r.sqrt_a) out["sqrt_A"] = matrix_to_json(*r.sqrt_a);
  if (r.mu) {
    out["mu"] = complex_to_json(*r.mu);
    out["abs_mu"] = std::abs(*r.mu);
  }
  return out;
}

}  // namespace seqeffect::io
