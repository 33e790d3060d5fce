#pragma once

#include <nlohmann/json_fwd.hpp>

#include "tomoed/estimator.hpp"
#include "tomoed/oed.hpp"
#include "tomoed/problems.hpp"

namespace tomoed {

using Json = nlohmann::json;

// Complex matrices are nested arrays of [re, im] pairs, one inner array per
// row; doubles round-trip bit-exactly through the shortest-representation
// printer.
Json cmat_to_json(const CMat& m);
CMat cmat_from_json(const Json& j);

Json rvec_to_json(const RVec& v);
RVec rvec_from_json(const Json& j);

Json povm_to_json(const PovmSet& p);
PovmSet povm_from_json(const Json& j);

Json ensemble_to_json(const ConfigurationEnsemble& e);
ConfigurationEnsemble ensemble_from_json(const Json& j);

Json counts_to_json(const CountData& d);
CountData counts_from_json(const Json& j);

/// Problem files carry a "type" discriminator:
/// state | state-dist | superop | osr-dist | hamiltonian.
/// Hamiltonian problems are named models (currently "hadamard") with
/// parameters, since an arbitrary evaluator has no JSON form.
Json problem_to_json(const EstimationProblem& p);
EstimationProblem problem_from_json(const Json& j);

/// Parameter points: {"rho": ...} | {"f": [...]} | {"q": [...]} |
/// {"x": ..., "dim": n} | {"theta": [...]}.
Json point_to_json(const ParamPoint& p);
ParamPoint point_from_json(const Json& j);

Json report_to_json(const EstimateReport& r);

Json design_to_json(const Design& d);
std::string design_to_csv(const Design& d, const std::vector<std::string>& labels);

Json fisher_summary_to_json(const FisherModel& m);

/// Strict parse with ParseError carrying the byte position.
Json parse_json_text(const std::string& text, const std::string& origin);
Json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const Json& j);

}  // namespace tomoed
