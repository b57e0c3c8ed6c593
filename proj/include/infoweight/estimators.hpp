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

// Private regression estimators.

#ifndef INFOWEIGHT_ESTIMATORS_HPP_
#define INFOWEIGHT_ESTIMATORS_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "infoweight/covariates.hpp"
#include "infoweight/glm_link.hpp"
#include "infoweight/info_matrix.hpp"
#include "infoweight/privacy.hpp"

namespace infoweight {

struct EstimateReport {
  Vector theta_hat;
  std::optional<InfoWeight> weight;
  double lambda_used = 0.0;
  double gamma_used = 0.0;
  // c in CI(x) = c |weight x|.
  std::optional<double> ci_scale;
  PrivacyLedger ledger;
  // Guarantee the estimator claims per record; compare with
  // ledger.per_record().
  PrivacyTotals declared;
  std::map<std::string, double> diagnostics;

  double ci(const Vector& x) const;
};

struct EstimatorOptions {
  // Use the proof constants: Laplace scale 2/alpha in the 1-d estimator,
  // and a full (alpha, beta) budget for every mechanism that touches a
  // record even when two mechanisms touch the same record.
  bool paper_constants = false;
  // Force all privacy noise to zero (ledger left empty).
  bool noise_free = false;
  // Overrides; 0 selects the default.
  int k_epochs = 0;
  double lambda = 0.0;
  double gamma = 0.0;
  // Multiplies the default gamma.
  double gamma_scale = 1.0;
  // Multiplies the default lambda.
  double lambda_scale = 1.0;
  bool l1_mode = false;
  // Skip the singular-value stability check of the LDP estimator.
  bool allow_unstable = false;
  // Run the clipped SGD at K = 1 when no epoch count is admissible.
  bool allow_inadmissible = false;
  SpectralOptions spectral;
  std::int64_t record_offset = 0;
};

// Budget of each of `n` mechanisms sharing one record.
PrivacyBudget shared_budget(const PrivacyBudget& b, int n,
                            const EstimatorOptions& o);

// argmin over |theta| <= 1 of |A theta - b|.
Vector constrained_least_squares(const Matrix& a, const Vector& b);

EstimateReport simple_ldp_1d(const Dataset& data, double alpha, RngStream& rng,
                             const EstimatorOptions& opts = {});

enum class SspMode { kCentral, kLocal };

// Central: SSP = sum x y + N(0, tau^2 I) with public covariates.
// Local: every record releases x x^T and x y through Gaussian channels.
// tau < 0 selects the calibrated default.
EstimateReport ssp_ols(const Dataset& data, const PrivacyBudget& budget,
                       double tau, double ridge, SspMode mode, RngStream& rng,
                       const EstimatorOptions& opts = {});

// Default regularizer of the LDP spectral iteration on n samples.
double default_lambda_ldp(int n, int d, double b, const PrivacyBudget& budget,
                          int k, double delta, double c);

struct LdpParams {
  double lambda;
  int k_epochs;
};
// n is the size of the first half used by the spectral iteration.
LdpParams default_ldp_params(int n, int d, double b,
                             const PrivacyBudget& budget, double delta,
                             const EstimatorOptions& opts);

EstimateReport iw_regression_ldp(const Dataset& data,
                                 const PrivacyBudget& budget, double delta,
                                 RngStream& rng,
                                 const EstimatorOptions& opts = {});

EstimateReport iw_regression_ldp_fixed_p(const Dataset& data,
                                         const MomentOracle& oracle,
                                         double alpha, RngStream& rng,
                                         const EstimatorOptions& opts = {});

struct DpParams {
  double lambda;
  double gamma;
  int k_epochs;
};
// Defaults of the DP estimator for t samples.
DpParams default_dp_params(int t, int d, double b, const PrivacyBudget& budget,
                           double delta, const EstimatorOptions& opts);

EstimateReport iw_regression_dp(const Dataset& data,
                                const PrivacyBudget& budget, double delta,
                                RngStream& rng,
                                const EstimatorOptions& opts = {});

EstimateReport iw_regression_dp_fixed_p(const Dataset& data,
                                        const MomentOracle& oracle,
                                        const PrivacyBudget& budget,
                                        RngStream& rng,
                                        const EstimatorOptions& opts = {});

// Projected SGD on {w : |U w| <= 1} for the reweighted GLM objective.
// Returns w_N.
Vector ldp_sgd(const Dataset& data, const SymMatrix& u, double lambda,
               const GlmLink& link, const PrivacyBudget& budget,
               RngStream& rng, bool noise_free);

EstimateReport glm_iw_ldp(const Dataset& data, const GlmLink& link,
                          const PrivacyBudget& budget, double delta,
                          RngStream& rng, const EstimatorOptions& opts = {});

// Defaults: lambda = sqrt(d / (mu^2 T)); gamma is the smallest value meeting
// both the spectral and the DP-ERM preconditions.
DpParams default_glm_dp_params(int t, int d, double b, double mu,
                               const PrivacyBudget& budget, double delta,
                               const EstimatorOptions& opts);

EstimateReport glm_iw_dp(const Dataset& data, const GlmLink& link,
                         const PrivacyBudget& budget, double delta,
                         RngStream& rng, const EstimatorOptions& opts = {});

// Minimizer over {w : |W w| <= 1} of the reweighted GLM loss plus
// (mu / 2) |W^{1/2} w|^2 in the metric lambda I + h_noise, to distance tol.
Vector dp_erm_minimizer(const Dataset& data, const SymMatrix& w, double gamma,
                        double lambda, const GlmLink& link,
                        const SymMatrix* h_noise, double tol);

// min{1/(2 sqrt T), (1/(sigma^2 T log(1/delta)))^{1/3}}.
double default_dp_sgd_eta(int t, const PrivacyBudget& budget, double delta);

// Average iterate of projected SGD on the unit ball, before privatization.
Vector dp_sgd_average(const Dataset& data, double eta);

EstimateReport dp_sgd_improper(const Dataset& data,
                               const PrivacyBudget& budget, double eta,
                               double delta, RngStream& rng,
                               const EstimatorOptions& opts = {});

// max{1, round(c (T / (sigma^2 log(T / delta)))^{1/3})}.
int default_clipped_sgd_epochs(int t, const PrivacyBudget& budget,
                               double delta, double c = 0.25);
// Largest K with R >= 1 + eta (B_delta + 4 eps_N); 0 if none.
int max_admissible_clipped_epochs(int t, double delta, double eta = 1.0,
                                  double r = 2.0);

EstimateReport ldp_clipped_sgd(const Dataset& data,
                               const PrivacyBudget& budget, int k_epochs,
                               double delta, RngStream& rng,
                               const EstimatorOptions& opts = {});

// Euclidean projection onto {z : |m z| <= 1}, m positive definite.
Vector project_ellipsoid(const Vector& v, const SymMatrix& m);

}  // namespace infoweight

#endif  // INFOWEIGHT_ESTIMATORS_HPP_
