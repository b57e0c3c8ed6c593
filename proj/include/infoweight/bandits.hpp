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

#ifndef INFOWEIGHT_BANDITS_HPP_
#define INFOWEIGHT_BANDITS_HPP_

#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "infoweight/estimators.hpp"
#include "infoweight/glm_link.hpp"
#include "infoweight/linalg.hpp"
#include "infoweight/privacy.hpp"
#include "infoweight/rng.hpp"

namespace infoweight {

// Rows are the action features phi(x, a).
using ActionFeatures = Matrix;

class BanditEnv {
 public:
  // Finite context set with probabilities.
  static BanditEnv finite(std::vector<ActionFeatures> contexts,
                          std::vector<double> probs, Vector theta_star,
                          GlmLink link = GlmLink::identity());
  // Contexts drawn by a sampler; d_A is declared by the caller.
  static BanditEnv generative(std::function<ActionFeatures(RngStream&)> sampler,
                              int num_actions, int d, int d_a,
                              Vector theta_star,
                              GlmLink link = GlmLink::identity());

  // n_contexts contexts of num_actions unit features in R^d, uniform on the
  // sphere, theta_star uniform on the unit sphere.
  static BanditEnv random_sphere(int d, int num_actions, int n_contexts,
                                 RngStream& rng);
  // Each context has one best arm and suboptimality gaps drawn log-uniformly
  // from [g_min, g_max].
  static BanditEnv log_uniform_gaps(int d, int num_actions, int n_contexts,
                                    double g_min, double g_max,
                                    RngStream& rng);
  // Every context has gap >= delta_min between the best and second arm.
  static BanditEnv gap_instance(int d, int num_actions, int n_contexts,
                                double delta_min, RngStream& rng);
  // Generative contexts with features uniform on the unit sphere.
  static BanditEnv sphere_generative(int d, int num_actions, RngStream& rng);

  int dim() const { return d_; }
  int num_actions() const { return num_actions_; }
  int d_a() const { return d_a_; }
  bool finite() const { return !contexts_.empty(); }
  const std::vector<ActionFeatures>& contexts() const { return contexts_; }
  const Vector& theta_star() const { return theta_star_; }
  const GlmLink& link() const { return link_; }

  struct Context {
    int index;  // -1 for generative contexts
    ActionFeatures features;
  };
  Context sample_context(RngStream& rng) const;
  Vector mean_rewards(const ActionFeatures& f) const;
  // Rademacher reward with mean f*(x, a).
  double sample_reward(const ActionFeatures& f, int a, RngStream& rng) const;
  // Minimum over finite contexts of best minus second-best mean reward.
  double min_gap() const;

 private:
  int d_ = 0;
  int num_actions_ = 0;
  int d_a_ = 0;
  std::vector<ActionFeatures> contexts_;
  std::vector<double> cdf_;
  std::function<ActionFeatures(RngStream&)> sampler_;
  Vector theta_star_;
  GlmLink link_ = GlmLink::identity();
};

struct RegretTrace {
  std::vector<int> action;
  std::vector<double> regret;
  std::vector<double> cum_regret;
  std::vector<int> epoch;
  // Round index at which each epoch starts.
  std::vector<int> epoch_start;
  // Rounds (0-based) from which a refitted policy is in force.
  std::vector<int> switch_rounds;
  int switches = 0;
  PrivacyLedger ledger;
  PrivacyTotals declared;
  std::map<std::string, double> diagnostics;
  // Per-epoch diagnostics, indexed by epoch.
  std::map<std::string, std::vector<double>> epoch_diagnostics;

  int rounds() const { return static_cast<int>(regret.size()); }
  // Cumulative regret after t rounds.
  double cum_at(int t) const;
  void write_csv(std::ostream& os) const;
};

// Row indices of a 2-approximate barycentric spanner of the rows of v.
std::vector<int> barycentric_spanner(const Matrix& v);
// Checks that every row of v is a combination of the spanner rows with
// coefficients in [-bound, bound].
bool verify_spanner(const Matrix& v, const std::vector<int>& spanner,
                    double bound);

// Keeps a in survivors with fhat(a) + ci(a) >= max_{a'} fhat(a') - ci(a');
// the max runs over all actions, or over survivors when restrict_max is set.
std::vector<int> eliminate(const std::vector<int>& survivors,
                           const Vector& fhat, const Vector& ci,
                           bool restrict_max = false);

enum class PrivacyModel { kJDP, kLDP };

struct EliminationConfig {
  PrivacyModel model = PrivacyModel::kJDP;
  // delta <= 0 selects 1 / T.
  double delta = 0.0;
  // Constants of the per-epoch lambda and gamma.
  double lambda_c = 1.0;
  double gamma_c = 1.0;
  bool restrict_max = false;
  bool noise_free = false;
  // Threshold Delta_min for the clipped-CI diagnostic; 0 disables it.
  double gap_diag = 0.0;
  EstimatorOptions estimator;
};

RegretTrace run_elimination_bandit(const BanditEnv& env,
                                   const PrivacyBudget& budget, int t_total,
                                   const EliminationConfig& cfg,
                                   RngStream& rng);

enum class SquareCbOracle { kDpSgd, kLdpClippedSgd };

// Inverse-gap weighting over fhat with learning rate gamma.
Vector igw_probabilities(const Vector& fhat, double gamma);

// Rate functions E_delta(N) used for the SquareCB learning rate.
double square_cb_rate(SquareCbOracle oracle, int n, double sigma,
                      double delta);

struct SquareCbConfig {
  SquareCbOracle oracle = SquareCbOracle::kDpSgd;
  double delta = 0.0;
  bool noise_free = false;
};

RegretTrace square_cb(const BanditEnv& env, const PrivacyBudget& budget,
                      int t_total, const SquareCbConfig& cfg, RngStream& rng);

}  // namespace infoweight

#endif  // INFOWEIGHT_BANDITS_HPP_
