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
#include <vector>

#include <doctest.h>

#include "infoweight/bandits.hpp"
#include "infoweight/errors.hpp"
#include "infoweight/rng.hpp"

namespace iw = infoweight;
using iw::Matrix;
using iw::Vector;

namespace {

// Two-dimensional env with one context: arm 0 has mean 1, others -1.
iw::BanditEnv dominant_env(int actions) {
  Matrix f = Matrix::Zero(actions, 2);
  f(0, 0) = 1.0;
  for (int a = 1; a < actions; ++a) f(a, 0) = -1.0;
  return iw::BanditEnv::finite({f}, {1.0}, Vector{{1.0, 0.0}});
}

void check_trace(const iw::RegretTrace& tr, int t) {
  REQUIRE(tr.rounds() == t);
  for (int i = 0; i < t; ++i) {
    CHECK(tr.regret[i] >= -1e-12);
    if (i > 0) CHECK(tr.cum_regret[i] >= tr.cum_regret[i - 1]);
  }
  CHECK(tr.switches <= static_cast<int>(std::ceil(std::log2(t))) + 1);
  CHECK(tr.switches <= static_cast<int>(tr.epoch_start.size()));
}

}  // namespace

TEST_SUITE("bandits") {

TEST_CASE("spanner examples") {
  const Matrix basis = Matrix::Identity(3, 3);
  auto s = iw::barycentric_spanner(basis);
  std::sort(s.begin(), s.end());
  CHECK(s == std::vector<int>{0, 1, 2});

  Matrix col(3, 3);
  col << 1, 0, 0, 2, 0, 0, 3, 0, 0;
  CHECK(iw::barycentric_spanner(col) == std::vector<int>{2});

  iw::RngStream rng(1);
  for (int rep = 0; rep < 20; ++rep) {
    Matrix v(20, 3);
    for (int i = 0; i < 20; ++i) v.row(i) = rng.normal_vector(3).transpose();
    const auto sp = iw::barycentric_spanner(v);
    CHECK(sp.size() <= 3u);
    CHECK(iw::verify_spanner(v, sp, 2.0 + 1e-9));
  }
  // Rank-deficient input: vectors in a plane.
  Matrix plane(10, 3);
  for (int i = 0; i < 10; ++i) {
    const Vector c = rng.normal_vector(2);
    plane.row(i) = Vector{{c(0), c(1), c(0) + c(1)}}.transpose();
  }
  const auto sp = iw::barycentric_spanner(plane);
  CHECK(sp.size() == 2u);
  CHECK(iw::verify_spanner(plane, sp, 2.0 + 1e-9));
  // Singletons are their own spanner.
  CHECK(iw::barycentric_spanner(Matrix::Ones(1, 3)) == std::vector<int>{0});
}

TEST_CASE("eliminate examples") {
  const std::vector<int> all{0, 1, 2};
  CHECK(iw::eliminate(all, Vector{{0.9, -0.5, 0.1}}, Vector::Constant(3, 2.0)) ==
        all);
  CHECK(iw::eliminate({0, 1}, Vector{{0.9, 0.1}}, Vector{{0.05, 0.05}}) ==
        std::vector<int>{0});
}

TEST_CASE("optimal arm survives valid confidence intervals") {
  iw::RngStream rng(2);
  for (int rep = 0; rep < 2000; ++rep) {
    const int k = 2 + static_cast<int>(rng.below(6));
    Vector fstar(k), ci(k), fhat(k);
    for (int a = 0; a < k; ++a) {
      fstar(a) = 2 * rng.uniform() - 1;
      ci(a) = 0.3 * rng.uniform();
      fhat(a) = fstar(a) + (2 * rng.uniform() - 1) * ci(a);
    }
    Eigen::Index best;
    fstar.maxCoeff(&best);
    std::vector<int> all(k);
    for (int a = 0; a < k; ++a) all[a] = a;
    for (bool restrict_max : {false, true}) {
      const auto out = iw::eliminate(all, fhat, ci, restrict_max);
      CHECK(!out.empty());
      CHECK(std::find(out.begin(), out.end(), best) != out.end());
    }
  }
}

TEST_CASE("inverse-gap weighting") {
  const Vector p = iw::igw_probabilities(Vector{{0.5, 0.0}}, 10.0);
  CHECK(p(0) == doctest::Approx(6.0 / 7));
  CHECK(p(1) == doctest::Approx(1.0 / 7));
  const Vector u = iw::igw_probabilities(Vector{{0.3, -0.2, 0.9}}, 0.0);
  for (int a = 0; a < 3; ++a) CHECK(u(a) == doctest::Approx(1.0 / 3));
  iw::RngStream rng(3);
  for (int rep = 0; rep < 500; ++rep) {
    const Vector f = rng.normal_vector(5);
    const Vector q = iw::igw_probabilities(f, 100 * rng.uniform());
    CHECK(q.sum() == doctest::Approx(1.0));
    CHECK(q.minCoeff() >= 0.0);
  }
  CHECK_THROWS_AS(iw::igw_probabilities(Vector{{0.1, 0.2}}, -1.0),
                  iw::ArgumentError);
}

TEST_CASE("environments respect reward and feature bounds") {
  iw::RngStream rng(4);
  const std::vector<iw::BanditEnv> envs = {
      iw::BanditEnv::random_sphere(3, 5, 20, rng),
      iw::BanditEnv::log_uniform_gaps(3, 4, 20, 0.01, 0.5, rng),
      iw::BanditEnv::gap_instance(2, 3, 10, 0.3, rng),
      iw::BanditEnv::sphere_generative(8, 4, rng),
  };
  for (const auto& env : envs) {
    for (int i = 0; i < 100; ++i) {
      const auto c = env.sample_context(rng);
      CHECK(c.features.rowwise().norm().maxCoeff() <= 1.0 + 1e-12);
      const Vector m = env.mean_rewards(c.features);
      CHECK(m.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
      const double r = env.sample_reward(c.features, 0, rng);
      CHECK(std::abs(r) <= 1.0);
    }
  }
  CHECK(envs[2].min_gap() >= 0.3 - 1e-9);
}

TEST_CASE("single action has zero regret") {
  iw::RngStream rng(5);
  const auto env = dominant_env(1);
  const iw::PrivacyBudget b(1.0, 0.05);
  for (auto model : {iw::PrivacyModel::kJDP, iw::PrivacyModel::kLDP}) {
    iw::EliminationConfig cfg;
    cfg.model = model;
    const auto tr = iw::run_elimination_bandit(env, b, 1000, cfg, rng);
    check_trace(tr, 1000);
    CHECK(tr.cum_regret.back() == 0.0);
  }
  iw::SquareCbConfig sq;
  const auto tr = iw::square_cb(env, b, 1000, sq, rng);
  CHECK(tr.cum_regret.back() == 0.0);
}

TEST_CASE("dominant arm: regret flattens without noise") {
  iw::RngStream rng(6);
  const auto env = dominant_env(3);
  const iw::PrivacyBudget b(1.0, 0.05);
  iw::EliminationConfig cfg;
  cfg.noise_free = true;
  const int t = 4095;
  const auto tr = iw::run_elimination_bandit(env, b, t, cfg, rng);
  check_trace(tr, t);
  // Everything after the third epoch is regret-free.
  REQUIRE(tr.epoch_start.size() > 3u);
  const int from = tr.epoch_start[3];
  CHECK(tr.cum_regret.back() == doctest::Approx(tr.cum_regret[from - 1]));
  CHECK(tr.diagnostics.at("optimal_survived") == 1.0);
}

TEST_CASE("elimination invariants and ledgers") {
  iw::RngStream env_rng(7);
  const auto env = iw::BanditEnv::random_sphere(3, 5, 20, env_rng);
  const iw::PrivacyBudget b(1.0, 0.05);
  const int t = 8191;
  for (auto model : {iw::PrivacyModel::kJDP, iw::PrivacyModel::kLDP}) {
    iw::RngStream rng(8);
    iw::EliminationConfig cfg;
    cfg.model = model;
    const auto tr = iw::run_elimination_bandit(env, b, t, cfg, rng);
    check_trace(tr, t);
    CHECK(tr.diagnostics.at("spanner_violations") == 0.0);
    CHECK(tr.diagnostics.at("spanner_checks") > 0.0);
    const auto per = tr.ledger.per_record();
    CHECK(per.alpha <= tr.declared.alpha + 1e-12);
    CHECK(per.alpha == doctest::Approx(1.0));
    if (model == iw::PrivacyModel::kLDP) {
      for (const auto& e : tr.ledger.entries()) CHECK(e.local);
    }
    std::ostringstream os;
    tr.write_csv(os);
    const std::string csv = os.str();
    CHECK(csv.rfind("t,regret,cum_regret,epoch,switches", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == t + 1);
  }
}

TEST_CASE("zero-noise elimination regret grows sublinearly") {
  iw::RngStream env_rng(9);
  const auto env = iw::BanditEnv::random_sphere(3, 5, 20, env_rng);
  const iw::PrivacyBudget b(1.0, 0.05);
  const int t = (1 << 16) - 1;
  auto slope_of = [&](double lambda_c, iw::PrivacyModel model) {
    iw::EliminationConfig cfg;
    cfg.noise_free = true;
    cfg.lambda_c = lambda_c;
    cfg.model = model;
    iw::RngStream rng(10);
    const auto tr = iw::run_elimination_bandit(env, b, t, cfg, rng);
    return std::log(tr.cum_at(t) / tr.cum_at(2047)) /
           std::log(double(t) / 2047);
  };
  for (auto model : {iw::PrivacyModel::kJDP, iw::PrivacyModel::kLDP}) {
    // At the default constant the CI 8 lambda |W phi| with log(1/delta) =
    // log T stays clamped at 2 through N ~ 2^11 even without noise.
    const double full = slope_of(1.0, model);
    const double tight = slope_of(0.125, model);
    MESSAGE("zero-noise regret slope 2^11..2^16: lambda_c 1 -> "
            << full << ", lambda_c 1/8 -> " << tight);
    CHECK(tight < 0.6);
    CHECK(tight < full);
  }
}

TEST_CASE("SquareCB runs and keeps the trace invariants") {
  iw::RngStream env_rng(11);
  const auto env = iw::BanditEnv::random_sphere(3, 4, 20, env_rng);
  const iw::PrivacyBudget b(1.0, 0.05);
  for (auto oracle :
       {iw::SquareCbOracle::kDpSgd, iw::SquareCbOracle::kLdpClippedSgd}) {
    iw::RngStream rng(12);
    iw::SquareCbConfig cfg;
    cfg.oracle = oracle;
    const auto tr = iw::square_cb(env, b, 4095, cfg, rng);
    check_trace(tr, 4095);
    const auto& g = tr.epoch_diagnostics.at("gamma");
    CHECK(g.front() == 1.0);
    CHECK(tr.ledger.per_record().alpha <= tr.declared.alpha + 1e-12);
  }
}

TEST_CASE("SquareCB rate functions") {
  const double s = 7.9, d = 0.01;
  CHECK(iw::square_cb_rate(iw::SquareCbOracle::kDpSgd, 100, s, d) ==
        doctest::Approx(std::pow(std::log(100.0) / 100, 0.25) +
                        std::cbrt(s * std::sqrt(std::log(100.0)) / 100)));
  CHECK(iw::square_cb_rate(iw::SquareCbOracle::kLdpClippedSgd, 100, s, d) ==
        doctest::Approx(std::pow(s * std::log(100 / d) / 100, 1.0 / 6)));
}

}  // TEST_SUITE
