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

#include <algorithm>
#include <cmath>
#include <sstream>

#include "infoweight/estimators.hpp"
#include "infoweight/log.hpp"

namespace infoweight {

double default_dp_sgd_eta(int t, const PrivacyBudget& budget, double delta) {
  const double s = budget.sigma();
  return std::min(0.5 / std::sqrt(static_cast<double>(t)),
                  std::cbrt(1.0 / (s * s * t * std::log(1.0 / delta))));
}

Vector dp_sgd_average(const Dataset& data, double eta) {
  const int d = data.dim();
  Vector theta = Vector::Zero(d);
  Vector sum = Vector::Zero(d);
  for (int t = 0; t < data.size(); ++t) {
    sum += theta;
    const auto x = data.x.row(t).transpose();
    theta -= (eta * (x.dot(theta) - data.y(t))) * x;
    theta = project_ball(theta, 1.0);
  }
  return sum / std::max(1, data.size());
}

EstimateReport dp_sgd_improper(const Dataset& data,
                               const PrivacyBudget& budget, double eta,
                               double delta, RngStream& rng,
                               const EstimatorOptions& opts) {
  const int t = data.size();
  if (t < 1) throw ArgumentError("dp_sgd_improper: empty data");
  if (data.bound > 1.0) throw ArgumentError("dp_sgd_improper: bound > 1");
  if (eta <= 0.0) eta = default_dp_sgd_eta(t, budget, delta);
  if (eta > 0.5) throw ArgumentError("dp_sgd_improper: eta > 1/2");
  EstimateReport r;
  r.theta_hat = dp_sgd_average(data, eta);
  if (!opts.noise_free) {
    r.theta_hat = gauss_priv(r.theta_hat, 2.0 * eta, budget, rng);
    r.ledger.add(gaussian_entry("gauss_priv[theta_bar]", budget, 2.0 * eta,
                                opts.record_offset, opts.record_offset + t,
                                false));
    r.declared = r.ledger.per_record();
  }
  r.diagnostics["eta"] = eta;
  return r;
}

int default_clipped_sgd_epochs(int t, const PrivacyBudget& budget,
                               double delta, double c) {
  const double s = budget.sigma();
  const double k = c * std::cbrt(t / (s * s * std::log(t / delta)));
  return std::max(1, static_cast<int>(std::lround(k)));
}

int max_admissible_clipped_epochs(int t, double delta, double eta, double r) {
  int best = 0;
  for (int k = 1; k <= t; ++k) {
    const int n = t / k;
    if (n < 1) break;
    const double root = std::sqrt(k * std::log(k / delta) / n);
    // R >= 1 + eta (B_delta + 4 eps_N) with B_delta = 6 (R + 1) root and
    // eps_N = (R + 1) root.
    if (r >= 1.0 + eta * 10.0 * (r + 1.0) * root) {
      best = k;
    } else {
      break;
    }
  }
  return best;
}

EstimateReport ldp_clipped_sgd(const Dataset& data,
                               const PrivacyBudget& budget, int k_epochs,
                               double delta, RngStream& rng,
                               const EstimatorOptions& opts) {
  constexpr double kEta = 1.0;
  constexpr double kR = 2.0;
  const int t = data.size();
  const int d = data.dim();
  int kmax = max_admissible_clipped_epochs(t, delta, kEta, kR);
  if (kmax < 1) {
    std::ostringstream os;
    os << "ldp_clipped_sgd: no admissible epoch count at T = " << t;
    if (!opts.allow_inadmissible) throw ConfigError(os.str());
    warn(os.str() + "; running K = 1");
    kmax = 1;
  }
  int k = k_epochs;
  if (k <= 0) {
    k = default_clipped_sgd_epochs(t, budget, delta);
    if (k > kmax) {
      std::ostringstream os;
      os << "ldp_clipped_sgd: default K = " << k
         << " is not admissible; using K = " << kmax;
      warn(os.str());
      k = kmax;
    }
  } else if (k > kmax) {
    std::ostringstream os;
    os << "ldp_clipped_sgd: K = " << k << " violates admissibility; "
       << "maximal admissible K = " << kmax;
    throw ConfigError(os.str());
  }
  const int n = t / k;
  const double noise_sd = budget.sigma() * (kR + 1.0) / std::sqrt(double(n));
  Vector theta = Vector::Zero(d);
  long clipped = 0;
  for (int e = 0; e < k; ++e) {
    Vector g = Vector::Zero(d);
    for (int i = e * n; i < (e + 1) * n; ++i) {
      const auto x = data.x.row(i).transpose();
      const double ip = x.dot(theta);
      if (std::abs(ip) > kR) ++clipped;
      g += (clip(ip, kR) - data.y(i)) * x;
    }
    g /= n;
    // Mean of n per-record perturbations, drawn as one Gaussian.
    if (!opts.noise_free) g += noise_sd * rng.normal_vector(d);
    theta -= kEta * g;
  }
  EstimateReport r;
  r.theta_hat = theta;
  if (!opts.noise_free) {
    r.ledger.add(gaussian_entry("gauss_priv[g_t]", budget, kR + 1.0,
                                opts.record_offset,
                                opts.record_offset + std::int64_t(k) * n,
                                true));
    r.declared = r.ledger.per_record();
  }
  r.diagnostics["k_epochs"] = k;
  r.diagnostics["max_admissible_k"] = kmax;
  r.diagnostics["clip_fraction"] = double(clipped) / (double(k) * n);
  return r;
}

}  // namespace infoweight
