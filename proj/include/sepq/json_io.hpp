#pragma once

#include <fstream>
#include <string>
#include <utility>

#include <json.hpp>

#include "sepq/pipeline.hpp"

namespace sepq {

using Json = nlohmann::json;

// State file schema: {"dims": [m, n], "matrix": [[[re, im], ...], ...]}.
inline Json state_to_json(const Matrix& entries, BipartiteDims dims) {
  Json j;
  j["dims"] = {dims.m, dims.n};
  Json rows = Json::array();
  for (int i = 0; i < entries.rows(); ++i) {
    Json row = Json::array();
    for (int k = 0; k < entries.cols(); ++k)
      row.push_back({entries(i, k).real(), entries(i, k).imag()});
    rows.push_back(std::move(row));
  }
  j["matrix"] = std::move(rows);
  return j;
}

inline std::pair<Matrix, BipartiteDims> state_from_json(const Json& j) {
  if (!j.contains("dims") || !j.contains("matrix"))
    throw Error("state file must contain \"dims\" and \"matrix\"");
  BipartiteDims dims{j.at("dims").at(0).get<int>(), j.at("dims").at(1).get<int>()};
  const auto& rows = j.at("matrix");
  const int d = static_cast<int>(rows.size());
  Matrix entries(d, d);
  for (int i = 0; i < d; ++i) {
    const auto& row = rows.at(i);
    if (static_cast<int>(row.size()) != d) throw Error("matrix rows must be square");
    for (int k = 0; k < d; ++k)
      entries(i, k) = Complex(row.at(k).at(0).get<double>(), row.at(k).at(1).get<double>());
  }
  return {entries, dims};
}

inline Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  Json j;
  in >> j;
  return j;
}

inline void save_json(const Json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(2) << "\n";
}

inline Json complex_vector_to_json(const Vector& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back({v(i).real(), v(i).imag()});
  return a;
}

inline Json certificate_to_json(const SeparableCertificate& c) {
  Json j;
  j["weights"] = Json::array();
  for (int i = 0; i < c.weights.size(); ++i) j["weights"].push_back(c.weights(i));
  j["rows"] = Json::array();
  for (const auto& row : c.rows_kept) j["rows"].push_back(complex_vector_to_json(row));
  j["components"] = Json::array();
  for (const auto& comp : c.components) {
    Json m = Json::array();
    for (int i = 0; i < comp.coeffs.rows(); ++i) {
      Json row = Json::array();
      for (int k = 0; k < comp.coeffs.cols(); ++k)
        row.push_back({comp.coeffs(i, k).real(), comp.coeffs(i, k).imag()});
      m.push_back(std::move(row));
    }
    j["components"].push_back({{"weight", comp.weight}, {"coeffs", std::move(m)}});
  }
  j["reconstruction_error"] = c.reconstruction_error;
  j["max_component_concurrence"] = c.max_component_concurrence;
  return j;
}

inline std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Separable: return "separable";
    case Outcome::Entangled: return "entangled";
    default: return "indeterminate";
  }
}

inline std::string to_string(EntangledReason r) {
  switch (r) {
    case EntangledReason::EmptyVariety: return "empty_variety";
    case EntangledReason::InfeasibleWeights: return "infeasible_weights";
    default: return "pure_entangled";
  }
}

inline std::string to_string(IndeterminateReason r) {
  switch (r) {
    case IndeterminateReason::PositiveDimensionalVariety: return "positive_dimensional_variety";
    case IndeterminateReason::DegreeOverflow: return "degree_overflow";
    case IndeterminateReason::SizeOverflow: return "size_overflow";
    default: return "certificate_check_failed";
  }
}

inline std::string to_string(OracleOutcome o) {
  switch (o) {
    case OracleOutcome::SeparableCertified: return "separable_certified";
    case OracleOutcome::EntangledCertified: return "entangled_certified";
    default: return "inconclusive";
  }
}

inline Json oracle_to_json(const OracleVerdict& v) {
  return Json{{"name", v.name}, {"outcome", to_string(v.outcome)}, {"witness_value", v.witness_value}};
}

// include_timings=false yields a byte-reproducible report.
inline Json verdict_to_json(const Verdict& v, bool include_timings = true) {
  Json j;
  j["outcome"] = to_string(v.outcome);
  if (v.entangled_reason)
    j["reason"] = to_string(*v.entangled_reason);
  else if (v.indeterminate_reason)
    j["reason"] = to_string(*v.indeterminate_reason);
  else
    j["reason"] = nullptr;
  j["witness"] = v.witness;
  j["certificate"] = v.certificate ? certificate_to_json(*v.certificate) : Json(nullptr);
  j["oracles"] = Json::array();
  for (const auto& o : v.oracle_reports) j["oracles"].push_back(oracle_to_json(o));
  if (v.xl_params) {
    j["xl_params"] = {{"r", v.xl_params->r},       {"N_eff", v.xl_params->n_eff},
                      {"delta", v.xl_params->delta}, {"D", v.xl_params->D},
                      {"n_eqs", v.xl_params->n_eqs}, {"n_vars", v.xl_params->n_vars}};
  } else {
    j["xl_params"] = nullptr;
  }
  if (!v.diagnostics.empty()) j["diagnostics"] = v.diagnostics;
  if (include_timings) {
    Json t;
    for (const auto& [name, ms] : v.timings_ms) t[name] = ms;
    j["timings_ms"] = std::move(t);
  }
  return j;
}

}  // namespace sepq
