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

double EstimateReport::ci(const Vector& x) const {
  if (!weight || !ci_scale) return 2.0;
  return *ci_scale * (weight->matrix * x).norm();
}

PrivacyBudget shared_budget(const PrivacyBudget& b, int n,
                            const EstimatorOptions& o) {
  if (o.paper_constants || n <= 1) return b;
  return b.scaled_alpha(1.0 / n);
}

Vector constrained_least_squares(const Matrix& a, const Vector& b) {
  const SymMatrix m(a.transpose() * a);
  const Vector c = a.transpose() * b;
  EigenSystem es = eig_sym(m);
  const Vector proj = es.vectors.transpose() * c;
  const double cut = 1e-14 * std::max(1.0, es.values(0));
  auto norm2_at = [&](double mu) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < proj.size(); ++i) {
      double den = std::max(es.values(i), 0.0) + mu;
      if (den <= cut) continue;
      s += proj(i) * proj(i) / (den * den);
    }
    return s;
  };
  auto solve_at = [&](double mu) {
    Vector z(proj.size());
    for (Eigen::Index i = 0; i < proj.size(); ++i) {
      double den = std::max(es.values(i), 0.0) + mu;
      z(i) = den > cut ? proj(i) / den : 0.0;
    }
    return Vector(es.vectors * z);
  };
  if (norm2_at(0.0) <= 1.0) return solve_at(0.0);
  // The KKT multiplier mu solves |(M + mu I)^{-1} c| = 1 and lies in
  // (0, |c|].
  double lo = 0.0, hi = std::max(c.norm(), 1e-300);
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (norm2_at(mid) > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-16 * hi) break;
  }
  Vector th = solve_at(hi);
  return project_ball(th, 1.0);
}

EstimateReport simple_ldp_1d(const Dataset& data, double alpha, RngStream& rng,
                             const EstimatorOptions& opts) {
  if (data.dim() != 1) throw ArgumentError("simple_ldp_1d: d != 1");
  if (!(alpha > 0)) throw ArgumentError("simple_ldp_1d: alpha <= 0");
  const int t = data.size();
  // Each statistic has sensitivity 2; strict mode spends alpha / 2 on each.
  const double sens = 2.0;
  const double eps = opts.paper_constants ? alpha : alpha / 2.0;
  double psi = 0.0, big_psi = 0.0;
  for (int i = 0; i < t; ++i) {
    const double x = data.x(i, 0);
    const double s = x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0);
    double a = s * data.y(i);
    double b = std::abs(x);
    if (!opts.noise_free) {
      a = laplace_priv(a, sens, eps, rng);
      b = laplace_priv(b, sens, eps, rng);
    }
    psi += a;
    big_psi += b;
  }
  psi /= t;
  big_psi /= t;
  EstimateReport r;
  r.theta_hat = Vector::Zero(1);
  if (big_psi > 0.0) {
    r.theta_hat(0) = clip(psi / big_psi, 1.0);
  } else {
    r.diagnostics["degenerate_denominator"] = 1.0;
  }
  r.diagnostics["psi_hat"] = psi;
  r.diagnostics["Psi_hat"] = big_psi;
  r.diagnostics["laplace_scale"] = sens / eps;
  if (!opts.noise_free) {
    for (const char* name : {"laplace_priv[sign(x)y]", "laplace_priv[|x|]"}) {
      LedgerEntry e;
      e.mechanism = name;
      e.alpha = eps;
      e.delta = sens;
      e.record_begin = opts.record_offset;
      e.record_end = opts.record_offset + t;
      e.local = true;
      r.ledger.add(e);
    }
    r.declared = {2.0 * eps, 0.0};
  }
  return r;
}

EstimateReport ssp_ols(const Dataset& data, const PrivacyBudget& budget,
                       double tau, double ridge, SspMode mode, RngStream& rng,
                       const EstimatorOptions& opts) {
  const int t = data.size();
  const int d = data.dim();
  const double b = data.bound;
  Matrix gram = data.x.transpose() * data.x;
  Vector s = data.x.transpose() * data.y;
  EstimateReport r;
  const std::int64_t lo = opts.record_offset, hi = opts.record_offset + t;
  if (!opts.noise_free) {
    if (mode == SspMode::kCentral) {
      const double sd = tau >= 0 ? tau : budget.sigma() * b;
      s += sd * rng.normal_vector(d);
      r.ledger.add(gaussian_entry("gauss_priv[sum xy]", budget, b, lo, hi,
                                  false));
      r.diagnostics["tau"] = sd;
    } else {
      const PrivacyBudget pb = shared_budget(budget, 2, opts);
      const double root_t = std::sqrt(static_cast<double>(t));
      // Sum of T independent per-record perturbations.
      const double sd_s = tau >= 0 ? tau : pb.sigma() * b;
      s += (sd_s * root_t) * rng.normal_vector(d);
      SymMatrix g = sym_gauss_priv(SymMatrix(gram), b * b * root_t, pb, rng);
      gram = g.mat();
      r.ledger.add(gaussian_entry("gauss_priv[x y]", pb, b, lo, hi, true));
      r.ledger.add(gaussian_entry("sym_gauss_priv[x x^T]", pb, b * b, lo, hi,
                                  true));
      r.diagnostics["tau"] = sd_s;
    }
    r.declared = r.ledger.per_record();
  }
  gram += ridge * Matrix::Identity(d, d);
  r.theta_hat = constrained_least_squares(gram, s);
  r.lambda_used = ridge;
  return r;
}

double default_lambda_ldp(int n, int d, double b, const PrivacyBudget& budget,
                          int k, double delta, double c) {
  return min_lambda_ldp(n / k, d, std::max(b, 1.0), budget.sigma(), k, delta,
                        c);
}

LdpParams default_ldp_params(int n, int d, double b,
                             const PrivacyBudget& budget, double delta,
                             const EstimatorOptions& opts) {
  const double c = opts.spectral.admissibility_c;
  LdpParams p{opts.lambda, opts.k_epochs > 0 ? opts.k_epochs : 12};
  if (p.lambda <= 0) {
    p.lambda = opts.lambda_scale *
               default_lambda_ldp(n, d, b, budget, p.k_epochs, delta, c);
    if (opts.k_epochs <= 0) {
      const int k2 = default_epochs_ldp(p.lambda);
      if (k2 != p.k_epochs) {
        p.k_epochs = k2;
        p.lambda = opts.lambda_scale *
                   default_lambda_ldp(n, d, b, budget, k2, delta, c);
      }
    }
  } else if (opts.k_epochs <= 0) {
    p.k_epochs = default_epochs_ldp(p.lambda);
  }
  return p;
}

EstimateReport iw_regression_ldp(const Dataset& data,
                                 const PrivacyBudget& budget, double delta,
                                 RngStream& rng,
                                 const EstimatorOptions& opts) {
  const int t = data.size();
  const int d = data.dim();
  if (t < 2) throw ArgumentError("iw_regression_ldp: T < 2");
  const int n = t / 2;
  const LdpParams p = default_ldp_params(n, d, data.bound, budget, delta, opts);
  const int k = p.k_epochs;
  const double lambda = p.lambda;

  EstimateReport r;
  SpectralOptions so = opts.spectral;
  so.noise_free = so.noise_free || opts.noise_free;
  so.ledger = &r.ledger;
  so.record_offset = opts.record_offset;
  SolveResult sr =
      spectral_iteration_ldp(data.slice(0, n), budget, delta, k, lambda, rng,
                             so);
  const SymMatrix& u = sr.weight.matrix;

  const int n1 = t - n;
  Vector psi = Vector::Zero(d);
  Matrix big_psi = Matrix::Zero(d, d);
  for (int i = n; i < t; ++i) {
    Vector x = data.x.row(i).transpose();
    Vector ux = u * x;
    double nrm = ux.norm();
    if (nrm <= 0.0) continue;
    psi += (data.y(i) / nrm) * ux;
    big_psi.noalias() += (ux / nrm) * x.transpose();
  }
  psi /= n1;
  big_psi /= n1;
  if (!so.noise_free) {
    const PrivacyBudget pb = shared_budget(budget, 2, opts);
    const double root = std::sqrt(static_cast<double>(n1));
    psi = gauss_priv(psi, 2.0 / root, pb, rng);
    big_psi = mat_gauss_priv(big_psi, 2.0 * data.bound / root, pb, rng);
    const std::int64_t lo = opts.record_offset + n;
    const std::int64_t hi = opts.record_offset + t;
    r.ledger.add(gaussian_entry("gauss_priv[psi_t]", pb, 2.0, lo, hi, true));
    r.ledger.add(gaussian_entry("gauss_priv[Psi_t]", pb, 2.0 * data.bound, lo,
                                hi, true));
    r.declared = r.ledger.per_record();
  }
  const Matrix a = big_psi + lambda * Matrix::Identity(d, d);
  Eigen::JacobiSVD<Matrix> svd(a * u.mat());
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(d - 1);
  r.diagnostics["sv_min"] = smin;
  r.diagnostics["sv_max"] = smax;
  r.diagnostics["k_epochs"] = k;
  if ((smin < 0.25 || smax > 4.0) && !opts.allow_unstable) {
    std::ostringstream os;
    os << "iw_regression_ldp: singular values of (Psi + lambda I) U in ["
       << smin << ", " << smax << "], outside [1/4, 4]";
    throw StabilityError(os.str());
  }
  r.theta_hat = constrained_least_squares(a, psi);
  r.weight = sr.weight;
  r.lambda_used = lambda;
  r.ci_scale = 8.0 * lambda;
  return r;
}

EstimateReport iw_regression_ldp_fixed_p(const Dataset& data,
                                         const MomentOracle& oracle,
                                         double alpha, RngStream& rng,
                                         const EstimatorOptions& opts) {
  const int t = data.size();
  const double lambda =
      opts.lambda > 0 ? opts.lambda : 1.0 / (alpha * std::sqrt(double(t)));
  // Solve until |F(U) - I| <= min{lambda lambda_min(U), 1}; the exact
  // solver's tolerance is far below that for the regimes used here.
  SolveResult sr = solve_exact(Model::kLDP, oracle, lambda, 0.0);
  const SymMatrix& u = sr.weight.matrix;
  const double need = std::min(lambda * min_eig(u), 1.0);
  if (sr.weight.residual > need) {
    sr = solve_exact(Model::kLDP, oracle, lambda, 0.0, 200, need * 1e-3, &u);
  }
  const int d = data.dim();
  Vector mean = Vector::Zero(d);
  for (int i = 0; i < t; ++i) {
    Vector x = data.x.row(i).transpose();
    Vector ux = sr.weight.matrix * x;
    double nrm = ux.norm();
    Vector v = nrm > 0 ? Vector(ux * (data.y(i) / nrm)) : Vector::Zero(d);
    mean += opts.noise_free ? v : djw_l2_priv(v, alpha, rng);
  }
  mean /= t;
  EstimateReport r;
  r.theta_hat = sr.weight.matrix * mean;
  r.weight = sr.weight;
  r.lambda_used = lambda;
  if (!opts.noise_free) {
    LedgerEntry e;
    e.mechanism = "djw_l2_priv[psi_t]";
    e.alpha = alpha;
    e.beta = 0.0;
    e.delta = 1.0;
    e.record_begin = opts.record_offset;
    e.record_end = opts.record_offset + t;
    e.local = true;
    r.ledger.add(e);
    r.declared = {alpha, 0.0};
  }
  return r;
}

DpParams default_dp_params(int t, int d, double b, const PrivacyBudget& budget,
                           double delta, const EstimatorOptions& opts) {
  DpParams p{};
  p.lambda = opts.lambda > 0
                 ? opts.lambda
                 : opts.lambda_scale *
                       (opts.l1_mode
                            ? std::sqrt(d * std::log(1.0 / delta) / t)
                            : 1.0 / std::sqrt(static_cast<double>(t)));
  p.k_epochs = opts.k_epochs > 0 ? opts.k_epochs : default_epochs_dp(p.lambda);
  const int n = (t / 2) / p.k_epochs;
  p.gamma = opts.gamma > 0
                ? opts.gamma
                : opts.gamma_scale *
                      min_gamma_lambda_dp(n, d, std::max(b, 1.0),
                                          budget.sigma(), p.k_epochs, delta,
                                          opts.spectral.admissibility_c) /
                      p.lambda;
  return p;
}

EstimateReport iw_regression_dp(const Dataset& data,
                                const PrivacyBudget& budget, double delta,
                                RngStream& rng,
                                const EstimatorOptions& opts) {
  const int t = data.size();
  const int d = data.dim();
  if (t < 2) throw ArgumentError("iw_regression_dp: T < 2");
  const int n = t / 2;
  const DpParams p = default_dp_params(t, d, data.bound, budget, delta, opts);
  EstimateReport r;
  SpectralOptions so = opts.spectral;
  so.noise_free = so.noise_free || opts.noise_free;
  so.ledger = &r.ledger;
  so.record_offset = opts.record_offset;
  SolveResult sr = spectral_iteration_dp(data.slice(0, n), budget, delta,
                                         p.k_epochs, p.gamma, p.lambda, rng,
                                         so);
  const SymMatrix& w = sr.weight.matrix;
  const int n1 = t - n;
  Vector psi = Vector::Zero(d);
  Matrix big_psi = Matrix::Zero(d, d);
  for (int i = n; i < t; ++i) {
    Vector x = data.x.row(i).transpose();
    Vector wx = w * x;
    double den = 1.0 + p.gamma * wx.norm();
    psi += (data.y(i) / den) * wx;
    big_psi.noalias() += (wx / den) * x.transpose();
  }
  psi /= n1;
  big_psi /= n1;
  if (!so.noise_free && p.gamma > 0) {
    const PrivacyBudget pb = shared_budget(budget, 2, opts);
    const double d_psi = 2.0 / (p.gamma * t);
    const double d_big = 2.0 * data.bound / (p.gamma * t);
    psi = gauss_priv(psi, d_psi, pb, rng);
    big_psi = mat_gauss_priv(big_psi, d_big, pb, rng);
    const std::int64_t lo = opts.record_offset + n;
    const std::int64_t hi = opts.record_offset + t;
    r.ledger.add(gaussian_entry("gauss_priv[psi]", pb, d_psi, lo, hi, false));
    r.ledger.add(gaussian_entry("gauss_priv[Psi]", pb, d_big, lo, hi, false));
    r.declared = r.ledger.per_record();
  }
  const Matrix a = big_psi + p.lambda * Matrix::Identity(d, d);
  Eigen::JacobiSVD<Matrix> svd(a);
  const double smin = svd.singularValues()(d - 1);
  if (!(smin > 1e-12 * std::max(1.0, svd.singularValues()(0)))) {
    throw StabilityError("iw_regression_dp: Psi + lambda I is singular");
  }
  r.theta_hat = a.fullPivLu().solve(psi);
  r.weight = sr.weight;
  r.lambda_used = p.lambda;
  r.gamma_used = p.gamma;
  r.ci_scale = 8.0 * p.lambda;
  r.diagnostics["k_epochs"] = p.k_epochs;
  return r;
}

EstimateReport iw_regression_dp_fixed_p(const Dataset& data,
                                        const MomentOracle& oracle,
                                        const PrivacyBudget& budget,
                                        RngStream& rng,
                                        const EstimatorOptions& opts) {
  const int t = data.size();
  const double a = budget.alpha();
  const double lambda =
      opts.lambda > 0 ? opts.lambda : 1.0 / std::sqrt(static_cast<double>(t));
  const double gamma = opts.gamma > 0
                           ? opts.gamma
                           : std::sqrt(std::log(1.0 / budget.beta()) /
                                       (a * a * t));
  SolveResult sr = solve_exact(Model::kDP, oracle, lambda, gamma);
  const SymMatrix& w = sr.weight.matrix;
  const int d = data.dim();
  Vector psi = Vector::Zero(d);
  for (int i = 0; i < t; ++i) {
    Vector x = data.x.row(i).transpose();
    Vector wx = w * x;
    psi += (data.y(i) / (1.0 + gamma * wx.norm())) * wx;
  }
  psi /= t;
  EstimateReport r;
  if (!opts.noise_free) {
    const double dl = 1.0 / (gamma * t);
    psi = gauss_priv(psi, dl, budget, rng);
    r.ledger.add(gaussian_entry("gauss_priv[psi]", budget, dl,
                                opts.record_offset, opts.record_offset + t,
                                false));
    r.declared = r.ledger.per_record();
  }
  r.theta_hat = w * psi;
  r.weight = sr.weight;
  r.lambda_used = lambda;
  r.gamma_used = gamma;
  return r;
}

}  // namespace infoweight
