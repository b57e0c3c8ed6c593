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

#include "infoweight/glm_link.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <utility>

#include "infoweight/errors.hpp"
#include "infoweight/log.hpp"

namespace infoweight {

namespace {
bool g_warnings = true;
}  // namespace

void warn(const std::string& msg) {
  if (g_warnings) std::cerr << "warning: " << msg << "\n";
}

void set_warnings_enabled(bool on) { g_warnings = on; }

GlmLink GlmLink::identity() { return GlmLink(); }

GlmLink GlmLink::logistic_scaled(double b) {
  GlmLink g;
  g.id_ = LinkId::kLogisticScaled;
  double th = std::tanh(b / 2.0);
  g.mu_ = 0.5 * (1.0 - th * th);
  return g;
}

GlmLink GlmLink::tabulated(std::vector<double> t, std::vector<double> nu,
                           double b) {
  if (t.size() != nu.size() || t.size() < 2) {
    throw ArgumentError("tabulated link: need matching grids of size >= 2");
  }
  if (t.front() > -b || t.back() < b) {
    throw ArgumentError("tabulated link: grid does not cover [-B, B]");
  }
  GlmLink g;
  g.id_ = LinkId::kTabulated;
  double mu = INFINITY;
  for (size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) throw ArgumentError("tabulated link: grid order");
    mu = std::min(mu, (nu[i] - nu[i - 1]) / (t[i] - t[i - 1]));
  }
  if (!(mu > 0)) throw ArgumentError("tabulated link: nu not increasing");
  // Cumulative integral from t[0]; shifted so that integral(0) = 0.
  std::vector<double> cum(t.size(), 0.0);
  for (size_t i = 1; i < t.size(); ++i) {
    cum[i] = cum[i - 1] + 0.5 * (nu[i] + nu[i - 1]) * (t[i] - t[i - 1]);
  }
  g.mu_ = mu;
  g.t_ = std::move(t);
  g.nu_ = std::move(nu);
  g.cum_ = std::move(cum);
  double c0 = 0.0;
  {
    auto it = std::upper_bound(g.t_.begin(), g.t_.end(), 0.0);
    size_t i = std::clamp<size_t>(it - g.t_.begin(), 1, g.t_.size() - 1);
    double h = 0.0 - g.t_[i - 1];
    double slope = (g.nu_[i] - g.nu_[i - 1]) / (g.t_[i] - g.t_[i - 1]);
    c0 = g.cum_[i - 1] + g.nu_[i - 1] * h + 0.5 * slope * h * h;
  }
  for (double& c : g.cum_) c -= c0;
  return g;
}

std::string GlmLink::name() const {
  switch (id_) {
    case LinkId::kIdentity:
      return "identity";
    case LinkId::kLogisticScaled:
      return "logistic";
    case LinkId::kTabulated:
      return "tabulated";
  }
  return "unknown";
}

double GlmLink::nu(double t) const {
  switch (id_) {
    case LinkId::kIdentity:
      return t;
    case LinkId::kLogisticScaled:
      return std::tanh(t / 2.0);
    case LinkId::kTabulated: {
      auto it = std::upper_bound(t_.begin(), t_.end(), t);
      size_t i = std::clamp<size_t>(it - t_.begin(), 1, t_.size() - 1);
      double s = (nu_[i] - nu_[i - 1]) / (t_[i] - t_[i - 1]);
      return nu_[i - 1] + s * (t - t_[i - 1]);
    }
  }
  return 0.0;
}

double GlmLink::integral(double t) const {
  switch (id_) {
    case LinkId::kIdentity:
      return 0.5 * t * t;
    case LinkId::kLogisticScaled: {
      // 2 log cosh(t / 2), written to avoid overflow.
      double a = std::abs(t) / 2.0;
      return 2.0 * (a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0));
    }
    case LinkId::kTabulated: {
      auto it = std::upper_bound(t_.begin(), t_.end(), t);
      size_t i = std::clamp<size_t>(it - t_.begin(), 1, t_.size() - 1);
      double h = t - t_[i - 1];
      double s = (nu_[i] - nu_[i - 1]) / (t_[i] - t_[i - 1]);
      return cum_[i - 1] + nu_[i - 1] * h + 0.5 * s * h * h;
    }
  }
  return 0.0;
}

bool GlmLink::validate(double b, int grid) const {
  const double h = 2.0 * b / (grid - 1);
  for (int i = 0; i + 1 < grid; ++i) {
    double t0 = -b + i * h;
    double slope = (nu(t0 + h) - nu(t0)) / h;
    if (slope < mu_ * (1.0 - 1e-6) - 1e-12) return false;
  }
  return true;
}

}  // namespace infoweight
