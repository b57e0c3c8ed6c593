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

#ifndef INFOWEIGHT_HARNESS_HPP_
#define INFOWEIGHT_HARNESS_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <toml.hpp>

#include "infoweight/bandits.hpp"
#include "infoweight/covariates.hpp"
#include "infoweight/estimators.hpp"
#include "infoweight/serialize.hpp"

namespace infoweight {

inline constexpr int kSchemaVersion = 1;

// Covariate distribution description. Types: finite, simple, perturbed,
// sphere, rademacher, clipped_gaussian.
struct DistributionSpec {
  std::string type = "simple";
  int dim = 1;
  double bound = 1.0;
  // finite: atoms and probs.
  std::vector<std::vector<double>> atoms;
  std::vector<double> probs;
  // simple: eigenvalues of the diagonal covariance.
  std::vector<double> eigenvalues;
  // clipped_gaussian: generating covariance, row-major.
  std::vector<std::vector<double>> cov;
  // perturbed: base distribution and rho.
  std::shared_ptr<DistributionSpec> base;
  double rho = 0.0;
};

DistributionSpec distribution_from_toml(const toml::table& t,
                                        const std::string& path);
toml::table distribution_to_toml(const DistributionSpec& s);
CovariateDistribution build_distribution(const DistributionSpec& s);

struct LabelSpec {
  std::string kind = "rademacher";  // rademacher, bounded_noise, glm
  std::vector<double> theta;
  double noise = 0.0;
  std::string link = "identity";  // identity, logistic
  double misspec = 0.0;
};

LabelMechanism build_labels(const LabelSpec& s, double bound);

struct BanditSpec {
  std::string env = "random_sphere";  // random_sphere, log_uniform_gaps,
                                      // gap, sphere_generative
  int dim = 3;
  int actions = 5;
  int contexts = 50;
  double g_min = 0.01;
  double g_max = 1.0;
  double delta_min = 0.3;
  std::uint64_t env_seed = 1;
};

BanditEnv build_env(const BanditSpec& s);

// Estimator ids: simple_1d, ssp_central, ssp_local, iw_ldp, iw_dp,
// iw_ldp_fixed, iw_dp_fixed, glm_ldp, glm_dp, dp_sgd, clipped_sgd.
// Bandit ids: elim_jdp, elim_ldp, squarecb_jdp, squarecb_ldp.
struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  std::string kind = "sweep";
  std::uint64_t seed = 1;
  int replications = 1;
  std::vector<int> t_grid;
  std::string out;
  bool timing = true;
  int threads = 1;
  DistributionSpec distribution;
  LabelSpec labels;
  double alpha = 1.0;
  double beta = 0.05;
  double delta = 0.05;
  std::string algo = "iw_ldp";
  std::vector<std::string> metrics = {"l2_err"};
  EstimatorOptions estimator;
  // Extra estimator parameters.
  double tau = -1.0;
  double ridge = 0.0;
  double eta = 0.0;
  BanditSpec bandit;
  EliminationConfig elimination;
  // solve-info parameters.
  std::string model = "ldp";
  double lambda = 0.1;
  double gamma = 1.0;
};

ExperimentConfig parse_config(const toml::table& t);
ExperimentConfig load_config(const std::string& path);
Json config_to_json(const ExperimentConfig& c);

const std::vector<std::string>& metric_registry();

struct ResultRow {
  std::string run_id;
  std::uint64_t seed = 0;
  int t = 0;
  std::string algo;
  std::string metric;
  double value = 0.0;
  double wall_ms = 0.0;
};

void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const ResultRow& r);

struct SweepResult {
  std::vector<ResultRow> rows;
  // Worst per-record ledger total and declared guarantee across runs.
  PrivacyTotals ledger_max;
  PrivacyTotals declared_max;
  bool ledger_matches_declared = true;
  int failures = 0;
};

SweepResult run_sweep(const ExperimentConfig& config);
// Writes rows to out (via a temporary file and rename) and the sidecar
// <out>.config.json.
void write_sweep(const ExperimentConfig& config, const SweepResult& result);

// One estimator run on a fresh dataset.
EstimateReport run_estimator(const ExperimentConfig& config,
                             const Dataset& data, const MomentOracle* oracle,
                             RngStream& rng);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int excluded = 0;
};
// Least squares of log median(value) on log T.
SlopeFit fit_loglog_slope(const std::vector<std::pair<double, double>>& pts);

double median(std::vector<double> v);
double quantile(std::vector<double> v, double q);

// Frozen empirical measure used in place of an exact oracle.
MomentOracle estimate_moments_mc(const CovariateDistribution& dist,
                                 int samples, RngStream& rng);

// Runs f(i) for i in [0, n) on a pool of threads.
void parallel_for(int n, int threads, const std::function<void(int)>& f);

}  // namespace infoweight

#endif  // INFOWEIGHT_HARNESS_HPP_
