#include "tomoed/json_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tomoed/photonics.hpp"

namespace tomoed {

Json cmat_to_json(const CMat& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

CMat cmat_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw ParseError("matrix: expected nested arrays of [re, im] pairs");
  const Index rows = static_cast<Index>(j.size());
  const Index cols = static_cast<Index>(j[0].size());
  CMat m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    if (static_cast<Index>(j[static_cast<size_t>(i)].size()) != cols)
      throw ParseError("matrix: ragged rows");
    for (Index c = 0; c < cols; ++c) {
      const Json& e = j[static_cast<size_t>(i)][static_cast<size_t>(c)];
      if (!e.is_array() || e.size() != 2) throw ParseError("matrix: entry is not an [re, im] pair");
      m(i, c) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

Json rvec_to_json(const RVec& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

RVec rvec_from_json(const Json& j) {
  if (!j.is_array()) throw ParseError("vector: expected an array");
  RVec v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i) v(i) = j[static_cast<size_t>(i)].get<double>();
  return v;
}

Json povm_to_json(const PovmSet& p) {
  Json out;
  out["elements"] = Json::array();
  for (const CMat& e : p.elements) out["elements"].push_back(cmat_to_json(e));
  if (!p.labels.empty()) out["labels"] = p.labels;
  return out;
}

PovmSet povm_from_json(const Json& j) {
  PovmSet p;
  for (const Json& e : j.at("elements")) p.elements.push_back(cmat_from_json(e));
  if (j.contains("labels")) p.labels = j.at("labels").get<std::vector<std::string>>();
  return p;
}

Json ensemble_to_json(const ConfigurationEnsemble& e) {
  Json out;
  out["configs"] = Json::array();
  for (const Configuration& c : e.configs) {
    Json jc;
    jc["label"] = c.label;
    jc["input"] = cmat_to_json(c.input.rho);
    jc["povm"] = povm_to_json(c.povm);
    out["configs"].push_back(std::move(jc));
  }
  return out;
}

ConfigurationEnsemble ensemble_from_json(const Json& j) {
  ConfigurationEnsemble e;
  for (const Json& jc : j.at("configs")) {
    Configuration c;
    c.label = jc.at("label").get<std::string>();
    c.input = DensityMatrix{cmat_from_json(jc.at("input"))};
    c.povm = povm_from_json(jc.at("povm"));
    e.configs.push_back(std::move(c));
  }
  return e;
}

Json counts_to_json(const CountData& d) {
  Json out;
  out["counts"] = Json::array();
  for (const RVec& c : d.counts) out["counts"].push_back(rvec_to_json(c));
  return out;
}

CountData counts_from_json(const Json& j) {
  CountData d;
  for (const Json& c : j.at("counts")) d.counts.push_back(rvec_from_json(c));
  return d;
}

namespace {

Json hamiltonian_to_json(const HamiltonianProblem&) {
  throw ParseError("hamiltonian problems serialize only through named builders");
}

HamiltonianProblem hadamard_from_json(const Json& j) {
  const double eps = j.value("eps", 1.0);
  const std::string input = j.value("input", "ket0");
  photonics::HadamardInput in = photonics::HadamardInput::Ket0;
  if (input == "had0") in = photonics::HadamardInput::Had0;
  else if (input == "both") in = photonics::HadamardInput::Both;
  else if (input != "ket0") throw ParseError("hadamard: input must be ket0|had0|both");
  auto setup = photonics::hadamard_hamiltonian_problem(
      j.value("theta_surrogate", 1.0), eps, in, j.value("theta_lo", 0.8), j.value("theta_hi", 1.2),
      j.value("n_times", Index(100)));
  return std::move(setup.problem);
}

}  // namespace

Json problem_to_json(const EstimationProblem& p) {
  Json out;
  std::visit(
      [&](const auto& prob) {
        using P = std::decay_t<decltype(prob)>;
        if constexpr (std::is_same_v<P, StateProblem>) {
          out["type"] = "state";
          out["ensemble"] = ensemble_to_json(prob.ensemble);
        } else if constexpr (std::is_same_v<P, StateDistProblem>) {
          out["type"] = "state-dist";
          out["povms"] = Json::array();
          for (const PovmSet& s : prob.povms) out["povms"].push_back(povm_to_json(s));
          if (!prob.labels.empty()) out["labels"] = prob.labels;
          out["input_states"] = Json::array();
          for (const DensityMatrix& r : prob.input_states)
            out["input_states"].push_back(cmat_to_json(r.rho));
        } else if constexpr (std::is_same_v<P, SuperopProblem>) {
          out["type"] = "superop";
          out["ensemble"] = ensemble_to_json(prob.ensemble);
          out["basis"] = "pauli";
        } else if constexpr (std::is_same_v<P, OsrDistProblem>) {
          out["type"] = "osr-dist";
          out["ensemble"] = ensemble_to_json(prob.ensemble);
          out["kraus_groups"] = Json::array();
          for (const auto& group : prob.kraus_bar) {
            Json g = Json::array();
            for (const CMat& k : group) g.push_back(cmat_to_json(k));
            out["kraus_groups"].push_back(std::move(g));
          }
          if (prob.weight_check.size()) out["weight_check"] = rvec_to_json(prob.weight_check);
        } else {
          out = hamiltonian_to_json(prob);
        }
      },
      p);
  return out;
}

EstimationProblem problem_from_json(const Json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "state") {
    return StateProblem{ensemble_from_json(j.at("ensemble"))};
  }
  if (type == "state-dist") {
    StateDistProblem p;
    for (const Json& s : j.at("povms")) p.povms.push_back(povm_from_json(s));
    if (j.contains("labels")) p.labels = j.at("labels").get<std::vector<std::string>>();
    for (const Json& r : j.at("input_states"))
      p.input_states.push_back(DensityMatrix{cmat_from_json(r)});
    return p;
  }
  if (type == "superop") {
    ConfigurationEnsemble e = ensemble_from_json(j.at("ensemble"));
    HermBasis basis = HermBasis::canonical(e.dim());
    return SuperopProblem{std::move(e), std::move(basis)};
  }
  if (type == "osr-dist") {
    OsrDistProblem p;
    p.ensemble = ensemble_from_json(j.at("ensemble"));
    for (const Json& g : j.at("kraus_groups")) {
      std::vector<CMat> group;
      for (const Json& k : g) group.push_back(cmat_from_json(k));
      p.kraus_bar.push_back(std::move(group));
    }
    if (j.contains("weight_check")) p.weight_check = rvec_from_json(j.at("weight_check"));
    return p;
  }
  if (type == "hamiltonian") {
    const std::string model = j.value("model", "hadamard");
    if (model == "hadamard") return hadamard_from_json(j);
    throw ParseError("hamiltonian: unknown model '" + model + "'");
  }
  throw ParseError("problem: unknown type '" + type + "'");
}

Json point_to_json(const ParamPoint& p) {
  Json out;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, DensityMatrix>) {
          out["rho"] = cmat_to_json(v.rho);
        } else if constexpr (std::is_same_v<T, Superoperator>) {
          out["x"] = cmat_to_json(v.x);
          out["dim"] = v.dim();
        } else {
          out["vector"] = rvec_to_json(v);
        }
      },
      p);
  return out;
}

ParamPoint point_from_json(const Json& j) {
  if (j.contains("rho")) return DensityMatrix{cmat_from_json(j.at("rho"))};
  if (j.contains("x")) {
    CMat x = cmat_from_json(j.at("x"));
    Index n = j.contains("dim") ? j.at("dim").get<Index>()
                                : static_cast<Index>(std::lround(std::sqrt(double(x.rows()))));
    return Superoperator{std::move(x), HermBasis::canonical(n)};
  }
  for (const char* key : {"f", "q", "theta", "vector"})
    if (j.contains(key)) return rvec_from_json(j.at(key));
  throw ParseError("point: expected one of rho | x | f | q | theta");
}

Json report_to_json(const EstimateReport& r) {
  Json out;
  out["estimate"] = point_to_json(r.estimate);
  out["neg_loglik"] = r.neg_loglik;
  out["lower_bound"] = r.lower_bound;
  out["gap"] = r.gap;
  out["kkt_residual"] = r.kkt_residual;
  out["iterations"] = r.iterations;
  out["converged"] = r.converged;
  if (r.purity) out["purity"] = *r.purity;
  if (r.purity_boundary) out["purity_boundary"] = *r.purity_boundary;
  if (r.eigenvalues) out["eigenvalues"] = rvec_to_json(*r.eigenvalues);
  if (r.trace_x) out["trace_x"] = *r.trace_x;
  if (r.trace_cap) out["trace_cap"] = *r.trace_cap;
  if (r.kraus_rank) out["kraus_rank"] = *r.kraus_rank;
  if (r.identifiable) out["identifiable"] = *r.identifiable;
  if (r.fisher_condition) out["fisher_condition"] = *r.fisher_condition;
  if (!r.local_minima.empty()) {
    out["local_minima"] = Json::array();
    for (size_t i = 0; i < r.local_minima.size(); ++i) {
      Json m;
      m["theta"] = rvec_to_json(r.local_minima[i]);
      m["neg_loglik"] = r.local_minima_values[i];
      out["local_minima"].push_back(std::move(m));
    }
  }
  return out;
}

Json design_to_json(const Design& d) {
  Json out;
  out["lambda"] = rvec_to_json(d.lambda);
  out["v_lambda"] = d.v_lambda;
  out["kkt_residual"] = d.kkt_residual;
  out["condition"] = d.condition;
  out["caveat"] =
      "lambda is optimal for the supplied surrogate, not for the unknown true parameter";
  if (d.lexpt) out["lexpt"] = *d.lexpt;
  if (d.rounding) out["ell"] = rvec_to_json(*d.rounding);
  if (d.rounded_total) out["rounded_total"] = *d.rounded_total;
  if (d.v_scaled) out["v_scaled"] = *d.v_scaled;
  if (d.v_rounded) out["v_rounded"] = *d.v_rounded;
  if (d.certificate) {
    Json c;
    c["dual_value"] = d.certificate->dual_value;
    c["duality_gap"] = d.certificate->duality_gap;
    c["max_slack"] = d.certificate->max_slack;
    c["cs_residual"] = d.certificate->cs_residual;
    out["certificate"] = std::move(c);
  }
  return out;
}

std::string design_to_csv(const Design& d, const std::vector<std::string>& labels) {
  std::ostringstream os;
  os.precision(12);
  os << "gamma,label,lambda,ell\n";
  for (Index g = 0; g < d.lambda.size(); ++g) {
    const std::string label = (g < static_cast<Index>(labels.size())) ? labels[static_cast<size_t>(g)] : "";
    os << (g + 1) << "," << label << "," << d.lambda(g) << ",";
    if (d.rounding) os << (*d.rounding)(g);
    os << "\n";
  }
  return os.str();
}

Json fisher_summary_to_json(const FisherModel& m) {
  Json out;
  out["parameterization"] = m.parameterization;
  out["d"] = m.d;
  out["n_cfg"] = m.n_cfg();
  IdentifiabilityRecord rec = identifiability(m);
  out["rank"] = rec.rank;
  out["condition"] = rec.condition;
  out["identifiable"] = rec.identifiable;
  out["spectrum"] = rvec_to_json(rec.spectrum);
  return out;
}

Json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // nlohmann reports a byte offset; translate to line/column for diagnostics
    size_t line = 1, col = 1;
    for (size_t i = 0; i < std::min(text.size(), static_cast<size_t>(e.byte)); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " +
                     e.what());
  }
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

void save_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace tomoed
