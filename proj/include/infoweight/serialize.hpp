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

#ifndef INFOWEIGHT_SERIALIZE_HPP_
#define INFOWEIGHT_SERIALIZE_HPP_

#include <json.hpp>

#include "infoweight/bandits.hpp"
#include "infoweight/estimators.hpp"
#include "infoweight/info_matrix.hpp"

namespace infoweight {

using Json = nlohmann::json;

// Matrices are arrays of rows.
Json to_json(const Matrix& m);
Json to_json(const Vector& v);
Json to_json(const SymMatrix& m);
Json to_json(const InfoWeight& w);
Json to_json(const SpectralTrace& t);
Json to_json(const PrivacyLedger& l);
Json to_json(const PrivacyTotals& t);
Json to_json(const EstimateReport& r);
// Summary only; the per-round trace goes to CSV.
Json to_json(const RegretTrace& r);

Matrix matrix_from_json(const Json& j);
Vector vector_from_json(const Json& j);
InfoWeight info_weight_from_json(const Json& j);
SpectralTrace spectral_trace_from_json(const Json& j);

}  // namespace infoweight

#endif  // INFOWEIGHT_SERIALIZE_HPP_
