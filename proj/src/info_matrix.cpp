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

#include "infoweight/info_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "infoweight/log.hpp"

namespace infoweight {

namespace {

void require_pd(const SymMatrix& m, const char* who) {
  if (!(min_eig(m) > 0.0)) {
    throw ArgumentError(std::string(who) + ": matrix not positive-definite");
  }
}

TraceStep step_of(const SymMatrix& f) {
  EigenSystem es = eig_sym(f);
  TraceStep s;
  s.max_eig = es.values(0);
  s.min_eig = es.values(es.values.size() - 1);
  s.residual = std::max(std::abs(s.max_eig - 1.0), std::abs(s.min_eig - 1.0));
  return s;
}

SymMatrix spectral_update(const SymMatrix& f, const SymMatrix& u) {
  return sym(mat_power(f, -0.5).mat() * u.mat());
}

void admissibility(bool ok, const std::string& msg, const SpectralOptions& o) {
  if (ok) return;
  if (o.strict) throw ConfigError(msg);
  warn(msg);
}

double loglog(double x) {
  double l = std::log(x);
  return l > 1.0 ? std::log(l) : 0.0;
}

}  // namespace

SymMatrix apply_F_ldp(const SymMatrix& u, double lambda,
                      const MomentOracle& oracle) {
  require_pd(u, "apply_F_ldp");
  return oracle.ldp_moment(u) + u * lambda;
}

SymMatrix apply_F_dp(const SymMatrix& w, double gamma, double lambda,
                     const MomentOracle& oracle) {
  require_pd(w, "apply_F_dp");
  return oracle.dp_moment(w, gamma) + w * lambda;
}

SymMatrix apply_F(Model model, const SymMatrix& m, double gamma, double lambda,
                  const MomentOracle& oracle) {
  return model == Model::kLDP ? apply_F_ldp(m, lambda, oracle)
                              : apply_F_dp(m, gamma, lambda, oracle);
}

SolveResult solve_exact(Model model, const MomentOracle& oracle, double lambda,
                        double gamma, int max_iters, double tol,
                        const SymMatrix* init) {
  if (!(lambda > 0.0)) throw ArgumentError("solve_exact: lambda <= 0");
  if (gamma < 0.0) throw ArgumentError("solve_exact: gamma < 0");
  SymMatrix u = init ? *init : SymMatrix::Identity(oracle.dim());
  SolveResult out;
  for (int k = 0;; ++k) {
    SymMatrix f = apply_F(model, u, gamma, lambda, oracle);
    TraceStep s = step_of(f);
    out.trace.steps.push_back(s);
    if (s.residual <= tol) {
      out.weight = {u, lambda, model == Model::kDP ? gamma : 0.0, s.residual,
                    model, model == Model::kDP && gamma == 0.0};
      return out;
    }
    if (k >= max_iters) break;
    u = spectral_update(f, u);
  }
  std::ostringstream os;
  os << "solve_exact: residual " << out.trace.steps.back().residual
     << " above tol " << tol << " after " << max_iters << " iterations";
  throw SolverConvergenceError(os.str(), out.trace);
}

bool sandwich_holds(const SymMatrix& f) {
  TraceStep s = step_of(f);
  return s.min_eig >= 0.5 && s.max_eig <= 2.0;
}

double min_lambda_ldp(int n_per_epoch, int d, double b, double sigma, int k,
                      double delta, double c) {
  return c * k * b * sigma *
         std::sqrt((d + std::log(k / delta)) / std::max(n_per_epoch, 1));
}

double min_gamma_lambda_dp(int n_per_epoch, int d, double b, double sigma,
                           int k, double delta, double c) {
  return c * sigma * b * std::sqrt(d + std::log(k / delta)) /
         std::max(n_per_epoch, 1);
}

int default_epochs_ldp(double lambda) {
  int k = 12;
  for (;;) {
    int need = static_cast<int>(std::ceil(loglog((2.0 * k + 1.0) / lambda)));
    if (need <= k) return k;
    k = need;
  }
}

int default_epochs_dp(double lambda) {
  return std::max(4, static_cast<int>(std::ceil(loglog(1.0 / lambda))));
}

SolveResult spectral_iteration_ldp(const Dataset& data,
                                   const PrivacyBudget& budget, double delta,
                                   int k_epochs, double lambda, RngStream& rng,
                                   const SpectralOptions& opts) {
  const int t = data.size();
  const int d = data.dim();
  const int k_total = k_epochs;
  if (k_total < 1) throw ArgumentError("spectral_iteration_ldp: K < 1");
  if (!(lambda > 0.0)) throw ArgumentError("spectral_iteration_ldp: lambda");
  const int n = t / k_total;
  if (n < 1) throw ConfigError("spectral_iteration_ldp: batch size N = 0");
  const double bound = data.bound;
  const double sigma = opts.noise_free ? 0.0 : budget.sigma();

  if (!opts.noise_free) {
    const double c = opts.strict ? std::max(opts.admissibility_c,
                                            kStrictAdmissibilityC)
                                 : opts.admissibility_c;
    const double lmin = min_lambda_ldp(n, d, bound, sigma, k_total, delta, c);
    std::ostringstream os;
    os << "spectral_iteration_ldp: lambda = " << lambda
       << " below the minimal admissible lambda " << lmin << " (C = " << c
       << ", K = " << k_total << ", N = " << n << ")";
    admissibility(lambda >= lmin, os.str(), opts);
    const double lam0 = lambda / (2.0 * k_total + 1.0);
    std::ostringstream ks;
    ks << "spectral_iteration_ldp: K = " << k_total
       << " below max{loglog(1/lambda0), 12}";
    admissibility(k_total >= std::max(12.0, loglog(1.0 / lam0)), ks.str(),
                  opts);
  }

  SymMatrix u = SymMatrix::Identity(d);
  SolveResult out;
  for (int k = 0; k < k_total; ++k) {
    const SymMatrix uh = mat_power(u, 0.5);
    Matrix h = Matrix::Zero(d, d);
    for (int i = k * n; i < (k + 1) * n; ++i) {
      Vector x = data.x.row(i).transpose();
      double nrm = (u * x).norm();
      if (nrm <= 0.0) continue;
      Vector v = uh * x;
      h.noalias() += (v * v.transpose()) / nrm;
    }
    h /= n;
    // The mean of N independent symmetric Gaussian perturbations of
    // scale sigma B equals one perturbation of scale sigma B / sqrt(N).
    SymMatrix hp(h);
    if (sigma > 0.0) {
      hp = sym_gauss_priv(hp, bound / std::sqrt(static_cast<double>(n)),
                          budget, rng);
    }
    const double lam_k = opts.schedule == LambdaSchedule::kRamp
                             ? (2.0 * k + 1.0) / (2.0 * k_total + 1.0) * lambda
                             : lambda;
    SymMatrix f = congruence(uh, hp) + u * lam_k;
    out.trace.steps.push_back(step_of(f));
    u = spectral_update(f, u);
  }
  if (opts.ledger && !opts.noise_free) {
    opts.ledger->add(gaussian_entry("sym_gauss_priv[V_t]", budget, bound,
                                    opts.record_offset,
                                    opts.record_offset + k_total * n, true));
  }
  out.weight.matrix = u;
  out.weight.lambda = lambda;
  out.weight.gamma = 0.0;
  out.weight.residual = out.trace.steps.back().residual;
  out.weight.model = Model::kLDP;
  out.weight.non_private = opts.noise_free;
  return out;
}

SolveResult spectral_iteration_dp(const Dataset& data,
                                  const PrivacyBudget& budget, double delta,
                                  int k_epochs, double gamma, double lambda,
                                  RngStream& rng,
                                  const SpectralOptions& opts) {
  const int t = data.size();
  const int d = data.dim();
  if (k_epochs < 1) throw ArgumentError("spectral_iteration_dp: K < 1");
  if (!(lambda > 0.0)) throw ArgumentError("spectral_iteration_dp: lambda");
  if (gamma < 0.0) throw ArgumentError("spectral_iteration_dp: gamma < 0");
  const int n = t / k_epochs;
  if (n < 1) throw ConfigError("spectral_iteration_dp: batch size N = 0");
  const double bound = data.bound;
  const bool non_private = opts.noise_free || gamma == 0.0;
  if (gamma == 0.0 && !opts.noise_free) {
    warn("spectral_iteration_dp: gamma = 0 is non-private (debug only)");
  }
  const double sigma = non_private ? 0.0 : budget.sigma();

  if (!non_private) {
    const double c = opts.strict ? std::max(opts.admissibility_c,
                                            kStrictAdmissibilityC)
                                 : opts.admissibility_c;
    const double need =
        min_gamma_lambda_dp(n, d, bound, sigma, k_epochs, delta, c);
    std::ostringstream os;
    os << "spectral_iteration_dp: gamma * lambda = " << gamma * lambda
       << " below the admissible bound " << need << "; minimal lambda "
       << need / gamma;
    admissibility(gamma * lambda >= need, os.str(), opts);
    admissibility(k_epochs >= std::max(4.0, loglog(1.0 / lambda)),
                  "spectral_iteration_dp: K below max{loglog(1/lambda), 4}",
                  opts);
  }

  SymMatrix w = SymMatrix::Identity(d);
  SolveResult out;
  for (int k = 0; k < k_epochs; ++k) {
    const SymMatrix wh = mat_power(w, 0.5);
    Matrix h = Matrix::Zero(d, d);
    for (int i = k * n; i < (k + 1) * n; ++i) {
      Vector x = data.x.row(i).transpose();
      Vector v = wh * x;
      h.noalias() += (v * v.transpose()) / (1.0 + gamma * (w * x).norm());
    }
    h /= n;
    SymMatrix hp(h);
    if (!non_private) {
      const double dlt = bound / (gamma * n);
      hp = sym_gauss_priv(hp, dlt, budget, rng);
      if (opts.ledger) {
        opts.ledger->add(gaussian_entry(
            "sym_gauss_priv[H]", budget, dlt,
            opts.record_offset + static_cast<std::int64_t>(k) * n,
            opts.record_offset + static_cast<std::int64_t>(k + 1) * n, false));
      }
    }
    SymMatrix f = congruence(wh, hp) + w * lambda;
    out.trace.steps.push_back(step_of(f));
    w = spectral_update(f, w);
  }
  out.weight.matrix = w;
  out.weight.lambda = lambda;
  out.weight.gamma = gamma;
  out.weight.residual = out.trace.steps.back().residual;
  out.weight.model = Model::kDP;
  out.weight.non_private = non_private;
  return out;
}

double price_of_privacy(const MomentOracle& oracle, double t,
                        const PrivacyBudget& budget) {
  const double a = budget.alpha();
  const double gamma = std::sqrt(std::log(1.0 / budget.beta()) / (a * a * t));
  const double lambda = 1.0 / std::sqrt(t);
  SolveResult r = solve_exact(Model::kDP, oracle, lambda, gamma);
  const Matrix& w = r.weight.matrix.mat();
  return (oracle.covariance().mat() * w * w).trace() / oracle.dim();
}

}  // namespace infoweight
