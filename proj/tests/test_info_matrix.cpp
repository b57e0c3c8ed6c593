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

#include <cmath>
#include <vector>

#include <doctest.h>

#include "infoweight/covariates.hpp"
#include "infoweight/errors.hpp"
#include "infoweight/info_matrix.hpp"
#include "infoweight/linalg.hpp"
#include "infoweight/rng.hpp"

namespace iw = infoweight;
using iw::Matrix;
using iw::Model;
using iw::SymMatrix;
using iw::Vector;

namespace {

constexpr double kPsdTol = 1e-9;

Vector e(int d, int i) {
  Vector v = Vector::Zero(d);
  v(i) = 1.0;
  return v;
}

iw::MomentOracle point_mass() {
  return iw::moment_oracle(
      iw::CovariateDistribution::finite_support({{Vector{{1.0}}, 1.0}}, 1.0));
}

iw::CovariateDistribution iso3() {
  return iw::CovariateDistribution::finite_support(
      {{e(3, 0), 1.0 / 3}, {e(3, 1), 1.0 / 3}, {e(3, 2), 1.0 / 3}}, 1.0);
}

// Random atoms in the unit ball with Dirichlet-like weights.
iw::CovariateDistribution random_instance(int d, int atoms,
                                          iw::RngStream& rng) {
  std::vector<iw::Atom> a;
  double total = 0.0;
  for (int i = 0; i < atoms; ++i) {
    Vector x = rng.unit_sphere(d) * (0.2 + 0.8 * rng.uniform());
    const double w = -std::log(1.0 - rng.uniform()) + 1e-3;
    a.push_back({x, w});
    total += w;
  }
  for (auto& at : a) at.prob /= total;
  return iw::CovariateDistribution::finite_support(std::move(a), 1.0);
}

SymMatrix random_pd(int d, iw::RngStream& rng) {
  Matrix a(d, d);
  for (int i = 0; i < d; ++i) a.col(i) = rng.normal_vector(d);
  return SymMatrix(a * a.transpose() / d + 0.2 * Matrix::Identity(d, d));
}

SymMatrix sq(const SymMatrix& m) { return SymMatrix(m.mat() * m.mat()); }

// Quadratic-root fixed point of the d = 1 point-mass DP operator.
double w_point_mass(double gamma, double lambda) {
  const double a = 1 + lambda * gamma, b = lambda - gamma;
  return (-b + std::sqrt(b * b + 4 * a)) / (2 * a);
}

}  // namespace

TEST_SUITE("info_matrix") {

TEST_CASE("apply_F_ldp examples") {
  const auto o1 = point_mass();
  CHECK(iw::apply_F_ldp(SymMatrix::Diagonal(Vector{{2.0 / 3}}), 0.5, o1)(0, 0) ==
        doctest::Approx(1.0));
  const auto o3 = iw::moment_oracle(iso3());
  const SymMatrix f = iw::apply_F_ldp(
      SymMatrix::Diagonal(Vector::Constant(3, 15.0 / 8)), 0.2, o3);
  CHECK((f.mat() - Matrix::Identity(3, 3)).norm() < 1e-12);
  const auto oz = iw::moment_oracle(iw::CovariateDistribution::finite_support(
      {{Vector{{0.0}}, 1.0}}, 1.0));
  CHECK(iw::apply_F_ldp(SymMatrix::Diagonal(Vector{{3.0}}), 0.5, oz)(0, 0) ==
        doctest::Approx(1.5));
  CHECK_THROWS_AS(
      iw::apply_F_ldp(SymMatrix::Diagonal(Vector{{-1.0}}), 0.5, o1),
      iw::ArgumentError);
}

TEST_CASE("apply_F_dp examples") {
  const auto o1 = point_mass();
  // gamma = 0, lambda = 0 is outside the solver domain but the operator is
  // well defined.
  CHECK(iw::apply_F_dp(SymMatrix::Diagonal(Vector{{1.0}}), 0.0, 0.0, o1)(0, 0) ==
        doctest::Approx(1.0));
  const double w = (0.9 + std::sqrt(5.21)) / 2.2;
  CHECK(w == doctest::Approx(1.44661).epsilon(1e-5));
  CHECK(std::abs(
            iw::apply_F_dp(SymMatrix::Diagonal(Vector{{w}}), 1.0, 0.1, o1)(0, 0) -
            1.0) < 1e-10);
}

TEST_CASE("large gamma tracks gamma U* at gamma lambda") {
  const auto o = iw::moment_oracle(iso3());
  const double lambda = 0.01;
  for (double gamma : {10.0, 100.0, 1000.0}) {
    const SymMatrix w =
        iw::solve_exact(Model::kDP, o, lambda, gamma).weight.matrix;
    const SymMatrix u =
        iw::solve_exact(Model::kLDP, o, gamma * lambda, 0.0).weight.matrix;
    const double ratio = w(0, 0) / (gamma * u(0, 0));
    CHECK(ratio >= 1.0 - 1e-9);
    CHECK(ratio <= 4.0 * (1 + gamma) / gamma);
  }
}

TEST_CASE("solve_exact examples") {
  const auto r1 =
      iw::solve_exact(Model::kLDP, point_mass(), 0.5, 0.0, 35, 1e-10);
  CHECK(r1.weight.matrix(0, 0) == doctest::Approx(2.0 / 3));
  CHECK(r1.weight.residual <= 1e-10);
  // Here F = 1.5 u, so the residual obeys r' = sqrt(1 + r) - 1 from r = 0.5.
  double r = 0.5;
  for (const auto& s : r1.trace.steps) {
    CHECK(s.residual == doctest::Approx(r).epsilon(1e-6));
    r = std::sqrt(1 + r) - 1;
  }
  CHECK(r1.trace.steps.size() == 33u);

  const auto r3 =
      iw::solve_exact(Model::kLDP, iw::moment_oracle(iso3()), 0.2, 0.0);
  CHECK((r3.weight.matrix.mat() - 1.875 * Matrix::Identity(3, 3)).norm() <
        1e-8);

  const auto rd = iw::solve_exact(Model::kDP, point_mass(), 0.1, 1.0);
  CHECK(rd.weight.matrix(0, 0) == doctest::Approx(w_point_mass(1.0, 0.1)));
  CHECK(rd.weight.matrix(0, 0) == doctest::Approx(1.44661).epsilon(1e-5));
}

TEST_CASE("solve_exact reports non-convergence with the trace") {
  try {
    iw::solve_exact(Model::kLDP, iw::moment_oracle(iso3()), 0.2, 0.0, 1,
                    1e-300);
    FAIL("expected SolverConvergenceError");
  } catch (const iw::SolverConvergenceError& err) {
    CHECK(err.trace().steps.size() == 2u);
  }
}

TEST_CASE("spectral trace contracts toward the identity") {
  iw::RngStream rng(1);
  for (int rep = 0; rep < 20; ++rep) {
    const auto o = iw::moment_oracle(random_instance(3, 6, rng));
    const double lambda = 0.05 + 0.45 * rng.uniform();
    const auto ldp = iw::solve_exact(Model::kLDP, o, lambda, 0.0).trace.steps;
    for (size_t k = 0; k + 1 < ldp.size(); ++k) {
      CHECK(ldp[k + 1].min_eig >= std::sqrt(ldp[k].min_eig) - 1e-12);
      CHECK(ldp[k + 1].max_eig <= std::sqrt(ldp[k].max_eig) + 1e-12);
    }
    const auto dp = iw::solve_exact(Model::kDP, o, lambda, 1.0).trace.steps;
    for (size_t k = 0; k + 1 < dp.size(); ++k) {
      CHECK(dp[k + 1].min_eig >=
            std::min(std::sqrt(dp[k].min_eig), 1.0) - 1e-12);
      CHECK(dp[k + 1].max_eig <=
            std::max(std::sqrt(dp[k].max_eig), 1.0) + 1e-12);
    }
  }
}

TEST_CASE("fixed point is unique") {
  iw::RngStream rng(2);
  const SymMatrix five = SymMatrix::Identity(3) * 5.0;
  for (int rep = 0; rep < 20; ++rep) {
    const auto o = iw::moment_oracle(random_instance(3, 6, rng));
    const double lambda = 0.05 + 0.45 * rng.uniform();
    for (Model m : {Model::kLDP, Model::kDP}) {
      const double gamma = m == Model::kDP ? 0.5 : 0.0;
      const auto a = iw::solve_exact(m, o, lambda, gamma);
      const auto b = iw::solve_exact(m, o, lambda, gamma, iw::kExactMaxIters,
                                     iw::kExactTol, &five);
      CHECK((a.weight.matrix.mat() - b.weight.matrix.mat())
                .cwiseAbs()
                .maxCoeff() <= 1e-7);
    }
  }
}

TEST_CASE("sandwich stability") {
  // Perturbed weights with F in [1/2, 2] stay within a factor 4 of U*^2.
  iw::RngStream rng(3);
  int tested = 0;
  for (int rep = 0; rep < 200 && tested < 50; ++rep) {
    const auto o = iw::moment_oracle(random_instance(3, 6, rng));
    const double lambda = 0.1;
    const SymMatrix ustar =
        iw::solve_exact(Model::kLDP, o, lambda, 0.0).weight.matrix;
    Matrix g(3, 3);
    for (int i = 0; i < 3; ++i) g.col(i) = rng.normal_vector(3);
    const Matrix s = Matrix::Identity(3, 3) + 0.1 * g;
    const SymMatrix u(s * ustar.mat() * s.transpose());
    if (!iw::sandwich_holds(iw::apply_F_ldp(u, lambda, o))) continue;
    ++tested;
    CHECK(iw::loewner_le(sq(u) * 0.25, sq(ustar), kPsdTol));
    CHECK(iw::loewner_le(sq(ustar), sq(u) * 4.0, kPsdTol));
  }
  CHECK(tested >= 10);
}

TEST_CASE("L1 covariance sandwich") {
  iw::RngStream rng(4);
  const int d = 3;
  for (int rep = 0; rep < 100; ++rep) {
    const auto o = iw::moment_oracle(random_instance(d, 5, rng));
    const double lambda = 0.02 + 0.5 * rng.uniform();
    const SymMatrix u =
        iw::solve_exact(Model::kLDP, o, lambda, 0.0).weight.matrix;
    const Vector theta = rng.normal_vector(d);
    const double lhs = (iw::mat_power(u, -1.0).mat() * theta).norm();
    const double mid = o.mean_abs_projection(theta) + lambda * theta.norm();
    CHECK(lhs <= mid * (1 + 1e-8));
    CHECK(mid <= (std::sqrt(d) + 1) * lhs * (1 + 1e-8));
  }
}

TEST_CASE("interleaving of W* and U*") {
  iw::RngStream rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const auto o = iw::moment_oracle(random_instance(3, 6, rng));
    const double lambda = 0.05 + 0.3 * rng.uniform();
    for (double gamma : {0.1, 1.0, 5.0}) {
      const SymMatrix w2 =
          sq(iw::solve_exact(Model::kDP, o, lambda, gamma).weight.matrix);
      const SymMatrix lo = sq(
          iw::solve_exact(Model::kLDP, o, gamma * lambda, 0.0).weight.matrix);
      const SymMatrix hi = sq(iw::solve_exact(Model::kLDP, o,
                                              (1 + gamma) * lambda, 0.0)
                                  .weight.matrix);
      CHECK(iw::loewner_le(lo * (gamma * gamma), w2, kPsdTol));
      CHECK(iw::loewner_le(w2, hi * (16 * (1 + gamma) * (1 + gamma)),
                           kPsdTol));
    }
  }
}

TEST_CASE("monotone operator implication") {
  iw::RngStream rng(6);
  const auto o = iw::moment_oracle(random_instance(3, 6, rng));
  const double lambda = 0.2;
  for (int rep = 0; rep < 50; ++rep) {
    const SymMatrix u = random_pd(3, rng), v = random_pd(3, rng);
    const SymMatrix fu = iw::apply_F_ldp(u, lambda, o);
    const SymMatrix fv = iw::apply_F_ldp(v, lambda, o);
    // Smallest C with F(U) <= C F(V).
    const SymMatrix fvh = iw::mat_power(fv, -0.5);
    const double c = iw::max_eig(iw::congruence(fvh, fu));
    CHECK(iw::loewner_le(u, v * (c * (1 + 1e-9)), kPsdTol));
  }
}

TEST_CASE("light-tail bounds") {
  iw::RngStream rng(7);
  int checked = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const auto p = random_instance(3, 6, rng);
    const auto o = iw::moment_oracle(p);
    const double kappa = iw::kappa_p(p, 0.5);
    if (!std::isfinite(kappa)) continue;
    ++checked;
    const double lambda = 0.05 + 0.3 * rng.uniform();
    const SymMatrix u2 =
        sq(iw::solve_exact(Model::kLDP, o, lambda, 0.0).weight.matrix);
    const Matrix sigma = o.covariance().mat();
    const SymMatrix inv_sq(
        (sigma + lambda * lambda * Matrix::Identity(3, 3)).inverse());
    const SymMatrix inv_lin(
        (sigma + lambda * Matrix::Identity(3, 3)).inverse());
    // Lower bound as stated; upper bound in the linear-regularizer form.
    CHECK(iw::loewner_le(inv_sq * 0.25, u2, kPsdTol));
    CHECK(iw::loewner_le(u2, inv_lin * (4 * kappa * kappa), kPsdTol));
    CHECK(iw::loewner_le(u2, inv_sq * (4 * kappa * kappa), kPsdTol));
  }
  CHECK(checked > 0);
}

TEST_CASE("zero-noise spectral iteration matches the exact solver") {
  // Every batch of a cyclic dataset is the isotropic 3-atom measure.
  const int k = 6, n = 30;
  iw::Dataset ds;
  ds.x = iw::RowMatrix::Zero(k * n, 3);
  ds.y = Vector::Zero(k * n);
  for (int i = 0; i < k * n; ++i) ds.x(i, i % 3) = 1.0;
  const auto o = iw::moment_oracle(iso3());
  const iw::PrivacyBudget b(1.0, 0.1);
  iw::SpectralOptions opts;
  opts.noise_free = true;
  opts.schedule = iw::LambdaSchedule::kConstant;
  iw::RngStream rng(8);
  const double lambda = 0.2;
  for (Model m : {Model::kLDP, Model::kDP}) {
    const double gamma = m == Model::kDP ? 0.7 : 0.0;
    iw::SpectralTrace exact;
    try {
      iw::solve_exact(m, o, lambda, gamma, k - 1, 0.0);
    } catch (const iw::SolverConvergenceError& err) {
      exact = err.trace();
    }
    const auto priv =
        m == Model::kLDP
            ? iw::spectral_iteration_ldp(ds, b, 0.05, k, lambda, rng, opts)
            : iw::spectral_iteration_dp(ds, b, 0.05, k, gamma, lambda, rng,
                                        opts);
    REQUIRE(exact.steps.size() == static_cast<size_t>(k));
    REQUIRE(priv.trace.steps.size() == static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) {
      CHECK(std::abs(priv.trace.steps[i].min_eig - exact.steps[i].min_eig) <
            1e-8);
      CHECK(std::abs(priv.trace.steps[i].max_eig - exact.steps[i].max_eig) <
            1e-8);
    }
  }
}

TEST_CASE("per-record statistic bounds") {
  iw::RngStream rng(9);
  for (int rep = 0; rep < 500; ++rep) {
    const int d = 4;
    const SymMatrix u = random_pd(d, rng);
    const Vector x = rng.unit_sphere(d) * (2.0 * rng.uniform());
    const SymMatrix uh = iw::mat_power(u, 0.5);
    const Vector v = uh * x;
    const double ux = (u * x).norm();
    // LDP statistic U^1/2 x x^T U^1/2 / |U x|.
    CHECK((v * v.transpose() / ux).norm() <= x.norm() * (1 + 1e-12));
    const double gamma = 0.1 + 3 * rng.uniform();
    CHECK((v * v.transpose() / (1 + gamma * ux)).norm() <=
          x.norm() / gamma * (1 + 1e-12));
  }
}

namespace {

// Sandwich frequency of the private solvers at T = 2e5, d = 3, alpha = 1.
template <class Solve>
double sandwich_rate(Solve solve, Model m, double gamma, double lambda,
                     int runs) {
  const auto p = iw::CovariateDistribution::finite_support(
      {{e(3, 0), 0.3},
       {e(3, 1), 0.2},
       {e(3, 2), 0.1},
       {Vector::Constant(3, 1.0 / std::sqrt(3.0)), 0.1},
       {Vector::Zero(3), 0.3}},
      1.0);
  const auto o = iw::moment_oracle(p);
  const auto labels = iw::LabelMechanism::rademacher(Vector{{0.5, -0.3, 0.2}});
  int ok = 0;
  for (int r = 0; r < runs; ++r) {
    iw::RngStream rng(iw::mix64(1000 + r));
    const auto ds = iw::sample_dataset(p, labels, 200000, rng);
    const SymMatrix w = solve(ds, rng).weight.matrix;
    ok += iw::sandwich_holds(iw::apply_F(m, w, gamma, lambda, o));
  }
  return static_cast<double>(ok) / runs;
}

}  // namespace

TEST_CASE("private solvers land in the sandwich") {
  const iw::PrivacyBudget b(1.0, 0.05);
  const double delta = 0.05;
  const int t = 200000;
  SUBCASE("LDP") {
    const int k = 12;
    const double lambda =
        iw::min_lambda_ldp(t / k, 3, 1.0, b.sigma(), k, delta, 1.0);
    const double rate = sandwich_rate(
        [&](const iw::Dataset& ds, iw::RngStream& rng) {
          return iw::spectral_iteration_ldp(ds, b, delta, k, lambda, rng);
        },
        Model::kLDP, 0.0, lambda, 100);
    MESSAGE("LDP sandwich rate " << rate << " at lambda " << lambda);
    CHECK(rate >= 0.95);
  }
  SUBCASE("DP") {
    const double lambda = 0.05;
    const int k = iw::default_epochs_dp(lambda);
    const double gamma =
        iw::min_gamma_lambda_dp(t / k, 3, 1.0, b.sigma(), k, delta, 1.0) /
        lambda;
    const double rate = sandwich_rate(
        [&](const iw::Dataset& ds, iw::RngStream& rng) {
          return iw::spectral_iteration_dp(ds, b, delta, k, gamma, lambda,
                                           rng);
        },
        Model::kDP, gamma, lambda, 100);
    MESSAGE("DP sandwich rate " << rate << " at gamma " << gamma);
    CHECK(rate >= 0.95);
  }
}

TEST_CASE("admissibility violations") {
  const iw::PrivacyBudget b(1.0, 0.05);
  iw::RngStream rng(10);
  const auto ds = iw::sample_dataset(
      iso3(), iw::LabelMechanism::rademacher(Vector::Zero(3)), 1200, rng);
  iw::SpectralOptions strict;
  strict.strict = true;
  CHECK_THROWS_AS(
      iw::spectral_iteration_ldp(ds, b, 0.05, 12, 0.01, rng, strict),
      iw::ConfigError);
  CHECK_NOTHROW(iw::spectral_iteration_ldp(ds, b, 0.05, 12, 0.01, rng));
  CHECK_THROWS_AS(
      iw::spectral_iteration_dp(ds, b, 0.05, 4, 0.01, 0.01, rng, strict),
      iw::ConfigError);
}

TEST_CASE("price of privacy") {
  const iw::PrivacyBudget b(1.0, 0.05);
  SUBCASE("point mass closed form") {
    const double t = 100;
    const double gamma = std::sqrt(std::log(1.0 / 0.05) / t);
    const double w = w_point_mass(gamma, 1.0 / std::sqrt(t));
    const double pop = iw::price_of_privacy(point_mass(), t, b);
    CHECK(pop == doctest::Approx(w * w).epsilon(1e-8));
    // |Sigma^1/2 W*| <= 2 + 2 gamma kappa with kappa = 1.
    CHECK(pop <= std::pow(2 + 2 * gamma, 2));
  }
  SUBCASE("vanishing regularization gives ratio 1") {
    const auto o = iw::moment_oracle(iso3());
    CHECK(iw::price_of_privacy(o, 1e12, b) ==
          doctest::Approx(1.0).epsilon(1e-4));
  }
  SUBCASE("cap on random instances") {
    iw::RngStream rng(11);
    for (int rep = 0; rep < 10; ++rep) {
      const auto p = random_instance(3, 6, rng);
      const double kappa = iw::kappa_p(p, 0.5);
      const double t = 1000;
      const double gamma = std::sqrt(std::log(1.0 / 0.05) / t);
      CHECK(iw::price_of_privacy(iw::moment_oracle(p), t, b) <=
            std::pow(2 + 2 * gamma * kappa, 2));
    }
  }
}

}  // TEST_SUITE
