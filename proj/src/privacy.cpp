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

#include "infoweight/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "infoweight/errors.hpp"

namespace infoweight {

PrivacyBudget::PrivacyBudget(double alpha, double beta)
    : alpha_(alpha), beta_(beta) {
  if (!(alpha > 0.0) || !(beta > 0.0) || beta > 1.0) {
    throw ArgumentError("PrivacyBudget: need alpha > 0 and beta in (0, 1]");
  }
}

double PrivacyBudget::sigma() const {
  return 4.0 * std::sqrt(std::log(2.5 / beta_)) / alpha_;
}

void PrivacyLedger::add(LedgerEntry e) {
  totals_.alpha += e.alpha;
  totals_.beta += e.beta;
  entries_.push_back(std::move(e));
}

void PrivacyLedger::merge(const PrivacyLedger& other) {
  for (const auto& e : other.entries_) add(e);
}

PrivacyTotals PrivacyLedger::per_record() const {
  // Sweep over range endpoints.
  std::map<std::int64_t, std::pair<double, double>> events;
  for (const auto& e : entries_) {
    if (e.record_end <= e.record_begin) continue;
    events[e.record_begin].first += e.alpha;
    events[e.record_begin].second += e.beta;
    events[e.record_end].first -= e.alpha;
    events[e.record_end].second -= e.beta;
  }
  PrivacyTotals cur, best;
  for (const auto& [pos, d] : events) {
    cur.alpha += d.first;
    cur.beta += d.second;
    best.alpha = std::max(best.alpha, cur.alpha);
    best.beta = std::max(best.beta, cur.beta);
  }
  return best;
}

namespace {

void check_delta(double delta) {
  if (!(delta >= 0.0)) throw ArgumentError("privacy channel: delta < 0");
}

}  // namespace

Vector gauss_priv(const Vector& v, double delta, const PrivacyBudget& budget,
                  RngStream& rng) {
  check_delta(delta);
  if (delta == 0.0) return v;
  return v + (budget.sigma() * delta) * rng.normal_vector(v.size());
}

SymMatrix sym_gauss_priv(const SymMatrix& m, double delta,
                         const PrivacyBudget& budget, RngStream& rng) {
  check_delta(delta);
  if (delta == 0.0) return m;
  const int d = m.dim();
  const double s = budget.sigma() * delta;
  Vector z = rng.normal_vector(d * (d + 1) / 2);
  Matrix out = m.mat();
  int k = 0;
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      out(i, j) += s * z(k);
      if (j != i) out(j, i) += s * z(k);
      ++k;
    }
  }
  return SymMatrix(out);
}

Matrix mat_gauss_priv(const Matrix& m, double delta,
                      const PrivacyBudget& budget, RngStream& rng) {
  check_delta(delta);
  if (delta == 0.0) return m;
  Vector z = rng.normal_vector(static_cast<int>(m.size()));
  return m + (budget.sigma() * delta) *
                 Eigen::Map<const Matrix>(z.data(), m.rows(), m.cols());
}

double laplace_priv(double v, double sensitivity, double eps, RngStream& rng) {
  if (!(eps > 0.0)) throw ArgumentError("laplace_priv: eps <= 0");
  if (!(sensitivity >= 0.0)) {
    throw ArgumentError("laplace_priv: sensitivity < 0");
  }
  if (sensitivity == 0.0) return v;
  return v + rng.laplace(sensitivity / eps);
}

double djw_radius(int d, double alpha) {
  const double ea = std::exp(alpha);
  const double gam = std::exp(std::lgamma((d - 1) / 2.0 + 1.0) -
                              std::lgamma(d / 2.0 + 1.0));
  return (ea + 1.0) / (ea - 1.0) * (std::sqrt(M_PI) / 2.0) * d * gam;
}

Vector djw_l2_priv(const Vector& v, double alpha, RngStream& rng) {
  if (!(alpha > 0.0)) throw ArgumentError("djw_l2_priv: alpha <= 0");
  const int d = static_cast<int>(v.size());
  const double n = v.norm();
  if (n > 1.0 + 1e-9) throw ArgumentError("djw_l2_priv: |v| > 1");
  Vector dir = n > 0.0 ? Vector(v / n) : rng.unit_sphere(d);
  if (rng.uniform() >= 0.5 + 0.5 * std::min(n, 1.0)) dir = -dir;
  const double ea = std::exp(alpha);
  const bool toward = rng.uniform() < ea / (ea + 1.0);
  Vector z = rng.unit_sphere(d);
  const double side = z.dot(dir);
  if ((toward && side < 0.0) || (!toward && side > 0.0)) z = -z;
  return djw_radius(d, alpha) * z;
}

LedgerEntry gaussian_entry(const std::string& name, const PrivacyBudget& b,
                           double delta, std::int64_t begin, std::int64_t end,
                           bool local) {
  LedgerEntry e;
  e.mechanism = name;
  e.alpha = b.alpha();
  e.beta = b.beta() / 2.0;
  e.delta = delta;
  e.record_begin = begin;
  e.record_end = end;
  e.local = local;
  return e;
}

}  // namespace infoweight
