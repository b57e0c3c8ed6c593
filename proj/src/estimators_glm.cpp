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
#include <vector>

#include "infoweight/estimators.hpp"
#include "infoweight/log.hpp"

namespace infoweight {

Vector project_ellipsoid(const Vector& v, const SymMatrix& m) {
  if ((m * v).norm() <= 1.0) return v;
  const EigenSystem es = eig_sym(m);
  const Vector c = es.vectors.transpose() * v;
  const Vector s2 = es.values.array().square();
  auto at = [&](double mu) {
    return Vector((c.array() / (1.0 + mu * s2.array())).matrix());
  };
  auto g = [&](double mu) {
    return (at(mu).array().square() * s2.array()).sum();
  };
  double lo = 0.0, hi = 1.0;
  while (g(hi) > 1.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return es.vectors * at(hi);
}

Vector ldp_sgd(const Dataset& data, const SymMatrix& u, double lambda,
               const GlmLink& link, const PrivacyBudget& budget,
               RngStream& rng, bool noise_free) {
  const int d = data.dim();
  const double mu = link.mu_lower();
  Vector w = Vector::Zero(d);
  for (int t = 0; t < data.size(); ++t) {
    const Vector x = data.x.row(t).transpose();
    const Vector ux = u * x;
    const double nrm = ux.norm();
    const Vector uw = u * w;
    Vector g = (lambda * mu) * uw;
    if (nrm > 0.0) g += (link.nu(ux.dot(w)) - data.y(t)) / nrm * ux;
    if (!noise_free) g = gauss_priv(g, 2.0, budget, rng);
    w -= (2.0 / (mu * (t + 1))) * g;
    const double s = (u * w).norm();
    if (s > 1.0) w /= s;
  }
  return w;
}

EstimateReport glm_iw_ldp(const Dataset& data, const GlmLink& link,
                          const PrivacyBudget& budget, double delta,
                          RngStream& rng, const EstimatorOptions& opts) {
  const int t = data.size();
  const int d = data.dim();
  if (t < 2) throw ArgumentError("glm_iw_ldp: T < 2");
  const int n = t / 2;
  const LdpParams p = default_ldp_params(n, d, data.bound, budget, delta, opts);
  EstimateReport r;
  SpectralOptions so = opts.spectral;
  so.noise_free = so.noise_free || opts.noise_free;
  so.ledger = &r.ledger;
  so.record_offset = opts.record_offset;
  SolveResult sr = spectral_iteration_ldp(data.slice(0, n), budget, delta,
                                          p.k_epochs, p.lambda, rng, so);
  const SymMatrix& u = sr.weight.matrix;
  const Vector w =
      ldp_sgd(data.slice(n, t), u, p.lambda, link, budget, rng, so.noise_free);
  if (!so.noise_free) {
    r.ledger.add(gaussian_entry("gauss_priv[g_t]", budget, 2.0,
                                opts.record_offset + n,
                                opts.record_offset + t, true));
    r.declared = r.ledger.per_record();
  }
  r.theta_hat = u * w;
  r.weight = sr.weight;
  r.lambda_used = p.lambda;
  r.diagnostics["k_epochs"] = p.k_epochs;
  return r;
}

namespace {

struct ErmProblem {
  std::vector<Vector> a;  // W x_t
  Vector c;               // 1 / (1 + gamma |W x_t|)
  Vector y;
  Matrix q;               // mu W^{1/2} (lambda I + Z) W^{1/2}
  const GlmLink* link;

  double value(const Vector& w) const {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      s += c(i) * link->loss(a[i].dot(w), y(i));
    }
    return s / a.size() + 0.5 * w.dot(q * w);
  }
  Vector grad(const Vector& w) const {
    Vector g = Vector::Zero(w.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      g += (c(i) * (link->nu(a[i].dot(w)) - y(i))) * a[i];
    }
    return Vector(g / a.size() + q * w);
  }
};

}  // namespace

Vector dp_erm_minimizer(const Dataset& data, const SymMatrix& w, double gamma,
                        double lambda, const GlmLink& link,
                        const SymMatrix* h_noise, double tol) {
  const int n = data.size();
  const int d = data.dim();
  if (n < 1) throw ArgumentError("dp_erm_minimizer: empty data");
  const double mu = link.mu_lower();
  const SymMatrix wh = mat_power(w, 0.5);
  ErmProblem pr;
  pr.link = &link;
  pr.y = data.y;
  pr.c.resize(n);
  pr.a.reserve(n);
  Matrix h = Matrix::Zero(d, d);
  for (int i = 0; i < n; ++i) {
    const Vector x = data.x.row(i).transpose();
    pr.a.push_back(w * x);
    pr.c(i) = 1.0 / (1.0 + gamma * pr.a.back().norm());
    const Vector hx = wh * x;
    h.noalias() += pr.c(i) * hx * hx.transpose();
  }
  Matrix inner = lambda * Matrix::Identity(d, d);
  if (h_noise) inner += h_noise->mat();
  pr.q = mu * (wh.mat() * inner * wh.mat());
  pr.q = 0.5 * (pr.q + pr.q.transpose());

  // Hessian lower bound: mu W^{1/2} (H + lambda I + Z) W^{1/2}.
  const SymMatrix hess_lb(mu * (wh.mat() * (h / n) * wh.mat()) + pr.q);
  const double strong = min_eig(hess_lb);
  if (!(strong > 0.0)) {
    throw NumericalError("dp_erm_minimizer: objective is not strongly convex");
  }
  double lip = std::max(max_eig(hess_lb), strong);

  Vector cur = Vector::Zero(d);
  double fcur = pr.value(cur);
  for (int it = 0; it < 100000; ++it) {
    const Vector g = pr.grad(cur);
    Vector next;
    double fnext;
    for (;;) {
      next = project_ellipsoid(cur - g / lip, w);
      fnext = pr.value(next);
      const Vector step = next - cur;
      if (fnext <= fcur + g.dot(step) + 0.5 * lip * step.squaredNorm() +
                       1e-15 * std::abs(fcur)) {
        break;
      }
      lip *= 2.0;
    }
    // |cur - w_hat| <= 2 |G(cur)| / strong for the gradient mapping G.
    const double gm = lip * (next - cur).norm();
    cur = next;
    fcur = fnext;
    if (2.0 * gm / strong <= tol) return cur;
    lip = std::max(strong, 0.9 * lip);
  }
  throw ConvergenceError("dp_erm_minimizer: no convergence");
}

DpParams default_glm_dp_params(int t, int d, double b, double mu,
                               const PrivacyBudget& budget, double delta,
                               const EstimatorOptions& opts) {
  DpParams p{};
  p.lambda = opts.lambda > 0 ? opts.lambda
                             : opts.lambda_scale *
                                   std::sqrt(d / (mu * mu * double(t)));
  p.k_epochs = opts.k_epochs > 0 ? opts.k_epochs : default_epochs_dp(p.lambda);
  const double c = opts.spectral.admissibility_c;
  const double bb = std::max(b, 1.0);
  const int n = (t / 2) / p.k_epochs;
  const double spectral =
      min_gamma_lambda_dp(n, d, bb, budget.sigma(), p.k_epochs, delta, c);
  const PrivacyBudget pb = shared_budget(budget, 2, opts);
  const double erm = c * (bb + 1.0 / mu) * pb.sigma() *
                     std::sqrt(d + std::log(p.k_epochs / delta)) / t;
  p.gamma = opts.gamma > 0
                ? opts.gamma
                : opts.gamma_scale * std::max(spectral, erm) / p.lambda;
  return p;
}

EstimateReport glm_iw_dp(const Dataset& data, const GlmLink& link,
                         const PrivacyBudget& budget, double delta,
                         RngStream& rng, const EstimatorOptions& opts) {
  const int t = data.size();
  const int d = data.dim();
  if (t < 2) throw ArgumentError("glm_iw_dp: T < 2");
  const double mu = link.mu_lower();
  const int n0 = t / 2;
  const DpParams p =
      default_glm_dp_params(t, d, data.bound, mu, budget, delta, opts);
  EstimateReport r;
  SpectralOptions so = opts.spectral;
  so.noise_free = so.noise_free || opts.noise_free;
  so.ledger = &r.ledger;
  so.record_offset = opts.record_offset;
  SolveResult sr = spectral_iteration_dp(data.slice(0, n0), budget, delta,
                                         p.k_epochs, p.gamma, p.lambda, rng,
                                         so);
  const SymMatrix& w = sr.weight.matrix;
  const Dataset d1 = data.slice(n0, t);
  const int n = d1.size();
  const double b = data.bound;
  const double delta_n = 32.0 * (1.0 / mu + b) / (p.gamma * n);
  const PrivacyBudget pb = shared_budget(budget, 2, opts);

  r.weight = sr.weight;
  r.lambda_used = p.lambda;
  r.gamma_used = p.gamma;
  r.diagnostics["k_epochs"] = p.k_epochs;
  r.diagnostics["delta_n"] = delta_n;

  std::optional<SymMatrix> z;
  if (!so.noise_free) {
    const double dh = 2.0 * b / (p.gamma * n);
    z = sym_gauss_priv(SymMatrix::Zero(d), dh, pb, rng);
    const std::int64_t lo = opts.record_offset + n0;
    const std::int64_t hi = opts.record_offset + t;
    r.ledger.add(gaussian_entry("sym_gauss_priv[H]", pb, dh, lo, hi, false));
    r.ledger.add(
        gaussian_entry("gauss_priv[w]", pb, 2.0 * delta_n, lo, hi, false));
    r.declared = r.ledger.per_record();
  }

  // Gate: H + Z >= W^{-1} / 4, i.e. W^{1/2} (H + Z) W^{1/2} >= I / 4.
  const SymMatrix wh = mat_power(w, 0.5);
  Matrix h = p.lambda * Matrix::Identity(d, d);
  for (int i = 0; i < n; ++i) {
    const Vector x = d1.x.row(i).transpose();
    const Vector hx = wh * x;
    h.noalias() += hx * hx.transpose() / (n * (1.0 + p.gamma * (w * x).norm()));
  }
  if (z) h += z->mat();
  const double gate = min_eig(SymMatrix(wh.mat() * h * wh.mat()));
  r.diagnostics["gate_min_eig"] = gate;
  if (gate < 0.25) {
    r.diagnostics["gate_failed"] = 1.0;
    r.theta_hat = Vector::Zero(d);
    return r;
  }
  r.diagnostics["gate_failed"] = 0.0;
  const double tol = so.noise_free ? 1e-10 : delta_n / 4.0;
  Vector wmin = dp_erm_minimizer(d1, w, p.gamma, p.lambda, link,
                                 z ? &*z : nullptr, tol);
  if (!so.noise_free) wmin = gauss_priv(wmin, 2.0 * delta_n, pb, rng);
  r.theta_hat = w * wmin;
  return r;
}

}  // namespace infoweight
