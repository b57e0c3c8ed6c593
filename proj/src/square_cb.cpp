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
#include <exception>
#include <sstream>

#include "infoweight/bandits.hpp"
#include "infoweight/log.hpp"

namespace infoweight {

Vector igw_probabilities(const Vector& fhat, double gamma) {
  const Eigen::Index k = fhat.size();
  if (k == 0) throw ArgumentError("igw_probabilities: no actions");
  if (gamma < 0.0) throw ArgumentError("igw_probabilities: gamma < 0");
  Eigen::Index best;
  const double top = fhat.maxCoeff(&best);
  Vector p(k);
  double rest = 0.0;
  for (Eigen::Index a = 0; a < k; ++a) {
    if (a == best) continue;
    p(a) = 1.0 / (k + gamma * (top - fhat(a)));
    rest += p(a);
  }
  p(best) = 1.0 - rest;
  return p;
}

double square_cb_rate(SquareCbOracle oracle, int n, double sigma,
                      double delta) {
  const double nn = std::max(1, n);
  const double l = std::log(1.0 / delta);
  if (oracle == SquareCbOracle::kDpSgd) {
    return std::pow(l / nn, 0.25) + std::cbrt(sigma * std::sqrt(l) / nn);
  }
  return std::pow(sigma * std::log(nn / delta) / nn, 1.0 / 6.0);
}

RegretTrace square_cb(const BanditEnv& env, const PrivacyBudget& budget,
                      int t_total, const SquareCbConfig& cfg,
                      RngStream& rng) {
  if (t_total < 1) throw ArgumentError("square_cb: T < 1");
  const int na = env.num_actions();
  const int d = env.dim();
  const double delta = cfg.delta > 0 ? cfg.delta : 1.0 / t_total;
  int epochs = 0;
  while ((std::int64_t{1} << epochs) - 1 < t_total) ++epochs;
  const double delta_p = delta / (2.0 * epochs * epochs);
  RegretTrace tr;
  RngStream env_rng = rng.split(1);
  RngStream play_rng = rng.split(2);
  RngStream est_rng = rng.split(3);
  Vector theta = Vector::Zero(d);
  double gamma = 1.0;
  double cum = 0.0;
  long failures = 0;
  for (int j = 0; j < epochs; ++j) {
    // Epoch j covers rounds [2^j, 2^{j+1}), 1-based.
    const std::int64_t start = (std::int64_t{1} << j) - 1;
    const std::int64_t stop =
        std::min<std::int64_t>((std::int64_t{1} << (j + 1)) - 1, t_total);
    const int n = static_cast<int>(stop - start);
    tr.epoch_start.push_back(static_cast<int>(start));
    tr.epoch_diagnostics["gamma"].push_back(gamma);
    Dataset data;
    data.x.resize(n, d);
    data.y.resize(n);
    data.bound = 1.0;
    for (int i = 0; i < n; ++i) {
      const auto ctx = env.sample_context(env_rng);
      const ActionFeatures& f = ctx.features;
      const Vector p = igw_probabilities(f * theta, gamma);
      double u = play_rng.uniform();
      int a = 0;
      for (; a < na - 1; ++a) {
        u -= p(a);
        if (u < 0.0) break;
      }
      const Vector mu = env.mean_rewards(f);
      const double reg = mu.maxCoeff() - mu(a);
      cum += reg;
      data.x.row(i) = f.row(a);
      data.y(i) = env.sample_reward(f, a, env_rng);
      tr.action.push_back(a);
      tr.regret.push_back(reg);
      tr.cum_regret.push_back(cum);
      tr.epoch.push_back(j);
    }
    if (stop >= t_total) break;
    EstimatorOptions opts;
    opts.noise_free = cfg.noise_free;
    opts.record_offset = start;
    try {
      EstimateReport rep =
          cfg.oracle == SquareCbOracle::kDpSgd
              ? dp_sgd_improper(data, budget, 0.0, delta_p, est_rng, opts)
              : ldp_clipped_sgd(data, budget, 0, delta_p, est_rng, opts);
      theta = rep.theta_hat;
      tr.ledger.merge(rep.ledger);
      tr.switch_rounds.push_back(static_cast<int>(stop));
    } catch (const std::exception& e) {
      // Epochs too short for the oracle keep the previous estimate.
      ++failures;
      std::ostringstream os;
      os << "square_cb epoch " << j << " (N = " << n
         << "): keeping previous estimate: " << e.what();
      warn(os.str());
      if (!cfg.noise_free) {
        LedgerEntry le;
        le.mechanism = "failed_epoch";
        le.alpha = budget.alpha();
        le.beta = budget.beta() / 2.0;
        le.record_begin = start;
        le.record_end = stop;
        le.local = cfg.oracle == SquareCbOracle::kLdpClippedSgd;
        tr.ledger.add(le);
      }
    }
    gamma = std::sqrt(static_cast<double>(na)) /
            square_cb_rate(cfg.oracle, n, budget.sigma(), delta_p);
  }
  tr.switches = static_cast<int>(tr.switch_rounds.size());
  tr.declared = tr.ledger.per_record();
  tr.diagnostics["failed_epochs"] = double(failures);
  tr.diagnostics["epochs"] = double(tr.epoch_start.size());
  return tr;
}

}  // namespace infoweight
