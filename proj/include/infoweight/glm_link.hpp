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

// Link functions for generalized linear models.

#ifndef INFOWEIGHT_GLM_LINK_HPP_
#define INFOWEIGHT_GLM_LINK_HPP_

#include <string>
#include <vector>

namespace infoweight {

enum class LinkId { kIdentity, kLogisticScaled, kTabulated };

class GlmLink {
 public:
  static GlmLink identity();
  // nu(t) = tanh(t / 2); mu_lower is the minimum slope on [-b, b].
  static GlmLink logistic_scaled(double b);
  // Piecewise-linear nu through (t_i, nu_i); the grid must cover [-b, b].
  static GlmLink tabulated(std::vector<double> t, std::vector<double> nu,
                           double b);

  LinkId id() const { return id_; }
  std::string name() const;
  double nu(double t) const;
  // Integral of nu from 0 to t.
  double integral(double t) const;
  double mu_lower() const { return mu_; }
  // Loss -y t + integral(t).
  double loss(double t, double y) const { return -y * t + integral(t); }

  // Finite-difference check of nu' >= mu_lower on [-b, b].
  bool validate(double b, int grid = 2001) const;

 private:
  LinkId id_ = LinkId::kIdentity;
  double mu_ = 1.0;
  std::vector<double> t_, nu_, cum_;
};

}  // namespace infoweight

#endif  // INFOWEIGHT_GLM_LINK_HPP_
