//
// Copyright 2026 The infoweight Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "infoweight/serialize.hpp"

#include "infoweight/errors.hpp"

namespace infoweight {

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json to_json(const SymMatrix& m) { return to_json(m.mat()); }

Json to_json(const InfoWeight& w) {
  const EigenSystem es = eig_sym(w.matrix);
  return {{"matrix", to_json(w.matrix)},
          {"lambda", w.lambda},
          {"gamma", w.gamma},
          {"residual", w.residual},
          {"model", w.model == Model::kLDP ? "ldp" : "dp"},
          {"non_private", w.non_private},
          {"eigenvalues", to_json(es.values)},
          {"min_eig", es.values(es.values.size() - 1)},
          {"max_eig", es.values(0)}};
}

Json to_json(const SpectralTrace& t) {
  Json steps = Json::array();
  for (const auto& s : t.steps) {
    steps.push_back(
        {{"min_eig", s.min_eig}, {"max_eig", s.max_eig}, {"residual", s.residual}});
  }
  return {{"steps", steps}};
}

Json to_json(const PrivacyTotals& t) {
  return {{"alpha", t.alpha}, {"beta", t.beta}};
}

Json to_json(const PrivacyLedger& l) {
  Json entries = Json::array();
  for (const auto& e : l.entries()) {
    entries.push_back({{"mechanism", e.mechanism},
                       {"alpha", e.alpha},
                       {"beta", e.beta},
                       {"delta", e.delta},
                       {"record_begin", e.record_begin},
                       {"record_end", e.record_end},
                       {"local", e.local}});
  }
  return {{"entries", entries},
          {"totals", to_json(l.totals())},
          {"per_record", to_json(l.per_record())}};
}

Json to_json(const EstimateReport& r) {
  Json j = {{"theta_hat", to_json(r.theta_hat)},
            {"lambda_used", r.lambda_used},
            {"gamma_used", r.gamma_used},
            {"ledger", to_json(r.ledger)},
            {"declared", to_json(r.declared)},
            {"diagnostics", r.diagnostics}};
  if (r.weight) j["weight"] = to_json(*r.weight);
  if (r.ci_scale) j["ci_scale"] = *r.ci_scale;
  return j;
}

Json to_json(const RegretTrace& r) {
  return {{"rounds", r.rounds()},
          {"cum_regret", r.rounds() ? r.cum_regret.back() : 0.0},
          {"switches", r.switches},
          {"epoch_start", r.epoch_start},
          {"diagnostics", r.diagnostics},
          {"epoch_diagnostics", r.epoch_diagnostics},
          {"ledger_totals", to_json(r.ledger.totals())},
          {"per_record", to_json(r.ledger.per_record())},
          {"declared", to_json(r.declared)}};
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ArgumentError("matrix: empty array");
  const std::size_t rows = j.size(), cols = j[0].size();
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (j[i].size() != cols) throw ArgumentError("matrix: ragged rows");
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

Vector vector_from_json(const Json& j) {
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

InfoWeight info_weight_from_json(const Json& j) {
  InfoWeight w;
  w.matrix = SymMatrix(matrix_from_json(j.at("matrix")));
  w.lambda = j.at("lambda").get<double>();
  w.gamma = j.at("gamma").get<double>();
  w.residual = j.at("residual").get<double>();
  w.model = j.at("model").get<std::string>() == "ldp" ? Model::kLDP : Model::kDP;
  w.non_private = j.at("non_private").get<bool>();
  return w;
}

SpectralTrace spectral_trace_from_json(const Json& j) {
  SpectralTrace t;
  for (const auto& s : j.at("steps")) {
    t.steps.push_back({s.at("min_eig").get<double>(),
                       s.at("max_eig").get<double>(),
                       s.at("residual").get<double>()});
  }
  return t;
}

}  // namespace infoweight
