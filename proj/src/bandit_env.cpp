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
#include <numeric>

#include "infoweight/bandits.hpp"
#include "infoweight/errors.hpp"

namespace infoweight {

namespace {

int feature_rank(const ActionFeatures& f) {
  if (f.rows() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(f);
  const auto& s = svd.singularValues();
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > 1e-10 * std::max(1.0, s(0))) ++r;
  }
  return r;
}

Matrix random_rotation(int d, RngStream& rng) {
  Matrix g(d, d);
  for (int j = 0; j < d; ++j) g.col(j) = rng.normal_vector(d);
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ();
}

// Features (r_a, rest) with |rest| <= sqrt(1 - r_a^2) in a random direction,
// then rotated; theta_star is the rotated first basis vector.
BanditEnv from_reward_lists(int d, const std::vector<Vector>& rewards,
                            RngStream& rng) {
  const Matrix q = random_rotation(d, rng);
  std::vector<ActionFeatures> ctx;
  for (const Vector& r : rewards) {
    ActionFeatures f = Matrix::Zero(r.size(), d);
    for (Eigen::Index a = 0; a < r.size(); ++a) {
      Vector v = Vector::Zero(d);
      v(0) = r(a);
      if (d > 1) {
        Vector rest = rng.unit_sphere(d - 1);
        double room = std::sqrt(std::max(0.0, 1.0 - r(a) * r(a)));
        v.tail(d - 1) = rest * (room * rng.uniform());
      }
      f.row(a) = (q * v).transpose();
    }
    ctx.push_back(std::move(f));
  }
  std::vector<double> probs(rewards.size(), 1.0 / rewards.size());
  return BanditEnv::finite(std::move(ctx), std::move(probs), q.col(0));
}

}  // namespace

BanditEnv BanditEnv::finite(std::vector<ActionFeatures> contexts,
                            std::vector<double> probs, Vector theta_star,
                            GlmLink link) {
  if (contexts.empty() || contexts.size() != probs.size()) {
    throw ArgumentError("BanditEnv::finite: contexts and probs mismatch");
  }
  BanditEnv env;
  env.d_ = static_cast<int>(contexts[0].cols());
  env.num_actions_ = static_cast<int>(contexts[0].rows());
  if (theta_star.size() != env.d_ || theta_star.norm() > 1.0 + 1e-12) {
    throw ArgumentError("BanditEnv::finite: bad theta_star");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < contexts.size(); ++i) {
    const auto& f = contexts[i];
    if (f.cols() != env.d_ || f.rows() != env.num_actions_) {
      throw ArgumentError("BanditEnv::finite: inconsistent feature shapes");
    }
    if (f.rowwise().norm().maxCoeff() > 1.0 + 1e-12) {
      throw ArgumentError("BanditEnv::finite: feature norm above 1");
    }
    if (probs[i] < 0.0) throw ArgumentError("BanditEnv::finite: prob < 0");
    env.d_a_ = std::max(env.d_a_, feature_rank(f));
    total += probs[i];
    env.cdf_.push_back(total);
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ArgumentError("BanditEnv::finite: probabilities do not sum to 1");
  }
  env.contexts_ = std::move(contexts);
  env.theta_star_ = std::move(theta_star);
  env.link_ = std::move(link);
  return env;
}

BanditEnv BanditEnv::generative(
    std::function<ActionFeatures(RngStream&)> sampler, int num_actions, int d,
    int d_a, Vector theta_star, GlmLink link) {
  if (theta_star.size() != d || theta_star.norm() > 1.0 + 1e-12) {
    throw ArgumentError("BanditEnv::generative: bad theta_star");
  }
  BanditEnv env;
  env.d_ = d;
  env.num_actions_ = num_actions;
  env.d_a_ = d_a;
  env.sampler_ = std::move(sampler);
  env.theta_star_ = std::move(theta_star);
  env.link_ = std::move(link);
  return env;
}

BanditEnv BanditEnv::random_sphere(int d, int num_actions, int n_contexts,
                                   RngStream& rng) {
  std::vector<ActionFeatures> ctx;
  for (int c = 0; c < n_contexts; ++c) {
    ActionFeatures f(num_actions, d);
    for (int a = 0; a < num_actions; ++a) f.row(a) = rng.unit_sphere(d);
    ctx.push_back(std::move(f));
  }
  std::vector<double> probs(n_contexts, 1.0 / n_contexts);
  return finite(std::move(ctx), std::move(probs), rng.unit_sphere(d));
}

BanditEnv BanditEnv::log_uniform_gaps(int d, int num_actions, int n_contexts,
                                      double g_min, double g_max,
                                      RngStream& rng) {
  if (!(g_min > 0.0) || g_max < g_min || g_max > 1.0) {
    throw ArgumentError("log_uniform_gaps: need 0 < g_min <= g_max <= 1");
  }
  std::vector<Vector> rewards;
  for (int c = 0; c < n_contexts; ++c) {
    Vector r(num_actions);
    const double best = g_max + (1.0 - g_max) * rng.uniform();
    const int star = static_cast<int>(rng.below(num_actions));
    for (int a = 0; a < num_actions; ++a) {
      const double g =
          g_min * std::exp(std::log(g_max / g_min) * rng.uniform());
      r(a) = a == star ? best : best - g;
    }
    rewards.push_back(r);
  }
  return from_reward_lists(d, rewards, rng);
}

BanditEnv BanditEnv::gap_instance(int d, int num_actions, int n_contexts,
                                  double delta_min, RngStream& rng) {
  if (!(delta_min > 0.0) || delta_min > 2.0) {
    throw ArgumentError("gap_instance: delta_min must lie in (0, 2]");
  }
  std::vector<Vector> rewards;
  for (int c = 0; c < n_contexts; ++c) {
    Vector r(num_actions);
    const int star = static_cast<int>(rng.below(num_actions));
    const double best = 1.0 - 0.5 * (2.0 - delta_min) * rng.uniform();
    for (int a = 0; a < num_actions; ++a) {
      const double lo = best - delta_min;
      r(a) = a == star ? best : -1.0 + (lo + 1.0) * rng.uniform();
    }
    rewards.push_back(r);
  }
  return from_reward_lists(d, rewards, rng);
}

BanditEnv BanditEnv::sphere_generative(int d, int num_actions,
                                       RngStream& rng) {
  auto sampler = [d, num_actions](RngStream& r) {
    ActionFeatures f(num_actions, d);
    for (int a = 0; a < num_actions; ++a) f.row(a) = r.unit_sphere(d);
    return f;
  };
  return generative(sampler, num_actions, d, std::min(d, num_actions),
                    rng.unit_sphere(d));
}

BanditEnv::Context BanditEnv::sample_context(RngStream& rng) const {
  if (finite()) {
    const double u = rng.uniform();
    int i = static_cast<int>(std::upper_bound(cdf_.begin(), cdf_.end(), u) -
                             cdf_.begin());
    i = std::min(i, static_cast<int>(contexts_.size()) - 1);
    return {i, contexts_[i]};
  }
  return {-1, sampler_(rng)};
}

Vector BanditEnv::mean_rewards(const ActionFeatures& f) const {
  Vector m = f * theta_star_;
  for (Eigen::Index a = 0; a < m.size(); ++a) m(a) = link_.nu(m(a));
  return m;
}

double BanditEnv::sample_reward(const ActionFeatures& f, int a,
                                RngStream& rng) const {
  const double m = clip(link_.nu(f.row(a).dot(theta_star_)), 1.0);
  return rng.uniform() < 0.5 * (1.0 + m) ? 1.0 : -1.0;
}

double BanditEnv::min_gap() const {
  double g = 2.0;
  for (const auto& f : contexts_) {
    Vector m = mean_rewards(f);
    std::sort(m.data(), m.data() + m.size(), std::greater<double>());
    if (m.size() > 1) g = std::min(g, m(0) - m(1));
  }
  return g;
}

}  // namespace infoweight
