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
#include <unordered_map>

#include "infoweight/bandits.hpp"
#include "infoweight/log.hpp"

namespace infoweight {

double RegretTrace::cum_at(int t) const {
  if (t <= 0) return 0.0;
  if (t > rounds()) throw ArgumentError("RegretTrace::cum_at: t > rounds");
  return cum_regret[t - 1];
}

void RegretTrace::write_csv(std::ostream& os) const {
  os << "t,regret,cum_regret,epoch,switches\n";
  int sw = 0;
  std::size_t next = 0;
  for (int t = 0; t < rounds(); ++t) {
    while (next < switch_rounds.size() && switch_rounds[next] <= t) {
      ++sw;
      ++next;
    }
    os << (t + 1) << ',' << regret[t] << ',' << cum_regret[t] << ','
       << epoch[t] << ',' << sw << '\n';
  }
}

std::vector<int> eliminate(const std::vector<int>& survivors,
                           const Vector& fhat, const Vector& ci,
                           bool restrict_max) {
  if (survivors.empty()) throw ArgumentError("eliminate: no survivors");
  double thresh = -std::numeric_limits<double>::infinity();
  if (restrict_max) {
    for (int a : survivors) thresh = std::max(thresh, fhat(a) - ci(a));
  } else {
    for (Eigen::Index a = 0; a < fhat.size(); ++a) {
      thresh = std::max(thresh, fhat(a) - ci(a));
    }
  }
  std::vector<int> out;
  for (int a : survivors) {
    if (fhat(a) + ci(a) >= thresh) out.push_back(a);
  }
  if (out.empty()) {
    int best = survivors[0];
    for (int a : survivors) {
      if (fhat(a) + ci(a) > fhat(best) + ci(best)) best = a;
    }
    out.push_back(best);
  }
  return out;
}

namespace {

struct EpochFit {
  Vector theta;
  SymMatrix weight;
  double ci_scale;
};

Vector fit_values(const BanditEnv& env, const EpochFit& fit,
                  const ActionFeatures& f) {
  Vector m = f * fit.theta;
  for (Eigen::Index a = 0; a < m.size(); ++a) m(a) = env.link().nu(m(a));
  return m;
}

// Unclipped norm part of the confidence width.
Vector fit_widths(const EpochFit& fit, const ActionFeatures& f) {
  return fit.ci_scale * (f * fit.weight.mat()).rowwise().norm();
}

struct Plan {
  std::vector<int> survivors;
  std::vector<int> spanner;
};

}  // namespace

RegretTrace run_elimination_bandit(const BanditEnv& env,
                                   const PrivacyBudget& budget, int t_total,
                                   const EliminationConfig& cfg,
                                   RngStream& rng) {
  if (t_total < 1) throw ArgumentError("run_elimination_bandit: T < 1");
  const int na = env.num_actions();
  const int d = env.dim();
  const double delta = cfg.delta > 0 ? cfg.delta : 1.0 / t_total;
  const double log_inv = std::log(1.0 / delta);
  RegretTrace tr;
  tr.action.reserve(t_total);
  tr.regret.reserve(t_total);
  tr.cum_regret.reserve(t_total);
  tr.epoch.reserve(t_total);
  std::vector<EpochFit> fits;
  bool optimal_survived = true;
  long spanner_checks = 0, spanner_violations = 0;
  double cum = 0.0;

  RngStream env_rng = rng.split(1);
  RngStream play_rng = rng.split(2);
  RngStream est_rng = rng.split(3);

  for (int j = 0;; ++j) {
    // Epoch j covers rounds [2^{j+1} - 1, 2^{j+2} - 1), 1-based.
    const std::int64_t start = (std::int64_t{1} << (j + 1)) - 2;
    if (start >= t_total) break;
    const std::int64_t stop =
        std::min<std::int64_t>((std::int64_t{1} << (j + 2)) - 2, t_total);
    tr.epoch_start.push_back(static_cast<int>(start));
    std::unordered_map<int, Plan> cache;
    const int n = static_cast<int>(stop - start);
    Dataset data;
    data.x.resize(n, d);
    data.y.resize(n);
    data.bound = 1.0;
    data.theta_star = env.theta_star();
    long ci_above = 0;
    double ci_sum = 0.0;
    const double ci_thresh =
        cfg.gap_diag > 0 ? cfg.gap_diag / (8.0 * std::max(1, env.d_a())) : 0;

    for (int i = 0; i < n; ++i) {
      const auto ctx = env.sample_context(env_rng);
      const ActionFeatures& f = ctx.features;
      auto plan_for = [&]() {
        Plan p;
        p.survivors.resize(na);
        for (int a = 0; a < na; ++a) p.survivors[a] = a;
        for (const EpochFit& fit : fits) {
          Vector ci = fit_widths(fit, f).cwiseMin(2.0);
          p.survivors =
              eliminate(p.survivors, fit_values(env, fit, f), ci,
                        cfg.restrict_max);
        }
        Matrix sub(p.survivors.size(), d);
        for (std::size_t k = 0; k < p.survivors.size(); ++k) {
          sub.row(k) = f.row(p.survivors[k]);
        }
        for (int k : barycentric_spanner(sub)) {
          p.spanner.push_back(p.survivors[k]);
        }
        if (!fits.empty()) {
          // A norm width on a 2-spanner: max over survivors is at most
          // 2 |spanner| times the spanner mean.
          const Vector b = fit_widths(fits.back(), f);
          double mx = 0.0, mean = 0.0;
          for (int a : p.survivors) mx = std::max(mx, b(a));
          for (int a : p.spanner) mean += b(a);
          mean /= p.spanner.size();
          ++spanner_checks;
          if (mx > 2.0 * p.spanner.size() * mean * (1 + 1e-9) + 1e-12) {
            ++spanner_violations;
          }
        }
        return p;
      };
      const Plan* plan;
      Plan local;
      if (ctx.index >= 0) {
        auto it = cache.find(ctx.index);
        if (it == cache.end()) it = cache.emplace(ctx.index, plan_for()).first;
        plan = &it->second;
      } else {
        local = plan_for();
        plan = &local;
      }
      const Vector mu = env.mean_rewards(f);
      Eigen::Index star;
      const double best = mu.maxCoeff(&star);
      if (std::find(plan->survivors.begin(), plan->survivors.end(),
                    static_cast<int>(star)) == plan->survivors.end()) {
        optimal_survived = false;
      }
      const int a = plan->spanner[play_rng.below(plan->spanner.size())];
      const double ci =
          fits.empty() ? 2.0 : std::min(fit_widths(fits.back(), f)(a), 2.0);
      ci_sum += ci;
      if (ci_thresh > 0 && ci >= ci_thresh) ++ci_above;
      data.x.row(i) = f.row(a);
      data.y(i) = env.sample_reward(f, a, env_rng);
      const double reg = best - mu(a);
      cum += reg;
      tr.action.push_back(a);
      tr.regret.push_back(reg);
      tr.cum_regret.push_back(cum);
      tr.epoch.push_back(j);
    }
    tr.epoch_diagnostics["mean_ci"].push_back(ci_sum / n);
    if (ci_thresh > 0) {
      tr.epoch_diagnostics["ci_above_gap_fraction"].push_back(
          double(ci_above) / n);
    }
    if (stop >= t_total) break;

    EstimatorOptions opts = cfg.estimator;
    opts.noise_free = opts.noise_free || cfg.noise_free;
    opts.record_offset = start;
    try {
      EstimateReport rep;
      const double lambda =
          cfg.lambda_c * std::sqrt(std::max(1, env.d_a()) * log_inv / n);
      // Zero-noise runs drop every sigma-dependent term.
      const double sigma = opts.noise_free ? 0.0 : budget.sigma();
      if (cfg.model == PrivacyModel::kJDP) {
        // The per-epoch form, raised to the admissible bound of the
        // spectral iteration when it falls short.
        const int k = opts.k_epochs > 0 ? opts.k_epochs
                                        : default_epochs_dp(lambda);
        const double gamma = std::max(
            cfg.gamma_c * (sigma * std::sqrt(d + log_inv) + log_inv) /
                (lambda * n),
            min_gamma_lambda_dp(std::max(1, (n / 2) / k), d, 1.0, sigma, k,
                                delta,
                                opts.spectral.admissibility_c) /
                lambda);
        opts.lambda = lambda;
        opts.gamma = gamma;
        rep = iw_regression_dp(data, budget, delta, est_rng, opts);
      } else {
        if (opts.noise_free && opts.lambda <= 0) opts.lambda = lambda;
        rep = iw_regression_ldp(data, budget, delta, est_rng, opts);
      }
      tr.ledger.merge(rep.ledger);
      fits.push_back({rep.theta_hat, rep.weight->matrix, *rep.ci_scale});
      tr.switch_rounds.push_back(static_cast<int>(stop));
      tr.epoch_diagnostics["lambda"].push_back(rep.lambda_used);
    } catch (const std::exception& e) {
      std::ostringstream os;
      os << "elimination epoch " << j << " (N = " << n
         << "): keeping previous policy: " << e.what();
      warn(os.str());
      tr.diagnostics["failed_epochs"] += 1.0;
      tr.epoch_diagnostics["lambda"].push_back(0.0);
      if (!opts.noise_free) {
        // Charge the estimator's full guarantee to the epoch's records.
        LedgerEntry le;
        le.mechanism = "failed_epoch";
        le.alpha = budget.alpha();
        le.beta = budget.beta();
        le.record_begin = start;
        le.record_end = stop;
        le.local = cfg.model == PrivacyModel::kLDP;
        tr.ledger.add(le);
      }
    }
  }
  tr.switches = static_cast<int>(tr.switch_rounds.size());
  tr.declared = tr.ledger.per_record();
  tr.diagnostics["optimal_survived"] = optimal_survived ? 1.0 : 0.0;
  tr.diagnostics["spanner_checks"] = double(spanner_checks);
  tr.diagnostics["spanner_violations"] = double(spanner_violations);
  tr.diagnostics["epochs"] = double(tr.epoch_start.size());
  return tr;
}

}  // namespace infoweight
