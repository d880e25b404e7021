#pragma once

// JSON encodings. A matrix is {"dim": d, "entries": [[[re, im], ...], ...]},
// row-major; ragged rows and non-finite entries are rejected.

#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

#include "seqeffect/axioms.hpp"
#include "seqeffect/classify.hpp"

namespace seqeffect::io {

using Json = nlohmann::ordered_json;

Json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const Json& j);

Json vector_to_json(const CVector& v);
Json complex_to_json(Complex z);

/// {"effects": [matrix, ...]}
std::vector<CMatrix> povm_from_json(const Json& j);
Json povm_to_json(const std::vector<CMatrix>& effects);

Json read_json_file(const std::filesystem::path& path);
CMatrix read_matrix_file(const std::filesystem::path& path);

Json to_json(const ToleranceConfig& tol);
Json to_json(const TrialInputs& in);
Json to_json(const ViolationWitness& w);
Json to_json(const ConditionReport& r);
Json to_json(const FuzzReport& r);
Json to_json(const PureMapClassification& c);
Json to_json(const ProofTraceReport& r);

/// Reads a witness back from its to_json encoding.
ViolationWitness witness_from_json(const Json& j);

}  // namespace seqeffect::io
