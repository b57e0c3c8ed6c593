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

#include <doctest.h>

#include "infoweight/errors.hpp"
#include "infoweight/privacy.hpp"
#include "infoweight/rng.hpp"

namespace iw = infoweight;
using iw::Vector;

namespace {

double sample_std(const std::vector<double>& xs) {
  double m = 0.0;
  for (double x : xs) m += x;
  m /= xs.size();
  double v = 0.0;
  for (double x : xs) v += (x - m) * (x - m);
  return std::sqrt(v / (xs.size() - 1));
}

}  // namespace

TEST_SUITE("rng") {

TEST_CASE("same seed and counter reproduce the stream") {
  iw::RngStream a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a() == b());
  CHECK(a.counter() == b.counter());
  iw::RngStream c(43);
  iw::RngStream d(42);
  int same = 0;
  for (int i = 0; i < 100; ++i) same += (c() == d());
  CHECK(same == 0);
}

TEST_CASE("split streams are deterministic and distinct") {
  const iw::RngStream root(7);
  iw::RngStream s1 = root.split(1), s1b = root.split(1), s2 = root.split(2);
  const auto x = s1(), xb = s1b(), y = s2();
  CHECK(x == xb);
  CHECK(x != y);
}

TEST_CASE("uniform and below ranges") {
  iw::RngStream r(9);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(r.below(7) < 7u);
  }
}

TEST_CASE("unit_sphere has unit norm") {
  iw::RngStream r(10);
  for (int i = 0; i < 100; ++i)
    CHECK(r.unit_sphere(5).norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("normal moments") {
  iw::RngStream r(11);
  std::vector<double> xs(100000);
  double m = 0.0;
  for (auto& x : xs) m += (x = r.normal());
  CHECK(std::abs(m / xs.size()) < 0.02);
  CHECK(std::abs(sample_std(xs) - 1.0) < 0.02);
}

}  // TEST_SUITE

TEST_SUITE("privacy") {

TEST_CASE("sigma formula") {
  const iw::PrivacyBudget b(1.0, 0.05);
  CHECK(b.sigma() == doctest::Approx(4.0 * std::sqrt(std::log(50.0))));
  CHECK(b.sigma() == doctest::Approx(7.9117).epsilon(1e-4));
  CHECK_THROWS_AS(iw::PrivacyBudget(0.0, 0.1), iw::ArgumentError);
  CHECK_THROWS_AS(iw::PrivacyBudget(1.0, 0.0), iw::ArgumentError);
  CHECK_THROWS_AS(iw::PrivacyBudget(1.0, 1.5), iw::ArgumentError);
}

TEST_CASE("zero sensitivity returns the input exactly") {
  iw::RngStream r(1);
  const iw::PrivacyBudget b(1.0, 0.1);
  const Vector v{{0.3, -1.0, 2.0}};
  CHECK((iw::gauss_priv(v, 0.0, b, r) - v).norm() == 0.0);
  const iw::SymMatrix m = iw::SymMatrix::Diagonal(v);
  CHECK((iw::sym_gauss_priv(m, 0.0, b, r).mat() - m.mat()).norm() == 0.0);
  CHECK(iw::laplace_priv(0.25, 0.0, 1.0, r) == 0.25);
}

TEST_CASE("argument errors") {
  iw::RngStream r(1);
  const iw::PrivacyBudget b(1.0, 0.1);
  CHECK_THROWS_AS(iw::gauss_priv(Vector::Zero(2), -1.0, b, r),
                  iw::ArgumentError);
  CHECK_THROWS_AS(iw::laplace_priv(0.0, 1.0, 0.0, r), iw::ArgumentError);
  CHECK_THROWS_AS(iw::djw_l2_priv(Vector{{1.1, 0.0}}, 1.0, r),
                  iw::ArgumentError);
}

TEST_CASE("gauss_priv calibration") {
  iw::RngStream r(2);
  const iw::PrivacyBudget b(0.5, 0.1);
  std::vector<double> xs(100000);
  for (auto& x : xs) x = iw::gauss_priv(Vector::Zero(1), 1.0, b, r)(0);
  CHECK(std::abs(sample_std(xs) / b.sigma() - 1.0) < 0.02);
}

TEST_CASE("sym_gauss_priv is symmetric and calibrated") {
  iw::RngStream r(3);
  const iw::PrivacyBudget b(1.0, 0.1);
  std::vector<double> off, diag;
  for (int i = 0; i < 25000; ++i) {
    const iw::SymMatrix z =
        iw::sym_gauss_priv(iw::SymMatrix::Zero(2), 1.0, b, r);
    CHECK(z(0, 1) == z(1, 0));
    off.push_back(z(0, 1));
    diag.push_back(z(0, 0));
    diag.push_back(z(1, 1));
  }
  CHECK(std::abs(sample_std(off) / b.sigma() - 1.0) < 0.03);
  CHECK(std::abs(sample_std(diag) / b.sigma() - 1.0) < 0.02);
}

TEST_CASE("symmetric Gaussian operator norm scales like sqrt(d)") {
  iw::RngStream r(4);
  // alpha chosen so that sigma == 1.
  const double beta = 0.1;
  const iw::PrivacyBudget b(4.0 * std::sqrt(std::log(2.5 / beta)), beta);
  REQUIRE(b.sigma() == doctest::Approx(1.0));
  std::vector<double> norms;
  for (int i = 0; i < 1000; ++i)
    norms.push_back(
        iw::op_norm(iw::sym_gauss_priv(iw::SymMatrix::Zero(10), 1.0, b, r)));
  std::sort(norms.begin(), norms.end());
  const double c = norms[500] / std::sqrt(10.0);
  MESSAGE("median |Z|_op / sqrt(d) = " << c);
  CHECK(c >= 1.5);
  CHECK(c <= 3.0);
}

TEST_CASE("laplace variance") {
  iw::RngStream r(5);
  const double scale = 4.0 / 0.5;  // sensitivity 2 at budget alpha/2, alpha=1
  std::vector<double> xs(100000);
  for (auto& x : xs) x = iw::laplace_priv(0.0, 2.0, 0.25, r);
  const double s = sample_std(xs);
  CHECK(std::abs(s * s / (2 * scale * scale) - 1.0) < 0.03);
}

TEST_CASE("djw channel is unbiased with bounded variance") {
  iw::RngStream r(6);
  const int n = 100000;
  Vector e1 = Vector::Zero(3);
  e1(0) = 1.0;
  Vector mean = Vector::Zero(3), mean0 = Vector::Zero(3);
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vector z = iw::djw_l2_priv(e1, 1.0, r);
    CHECK(z.norm() == doctest::Approx(iw::djw_radius(3, 1.0)));
    mean += z;
    sq += (z - e1).squaredNorm();
    mean0 += iw::djw_l2_priv(Vector::Zero(3), 1.0, r);
  }
  mean /= n;
  mean0 /= n;
  CHECK((mean - e1).cwiseAbs().maxCoeff() < 0.02 * iw::djw_radius(3, 1.0));
  CHECK(mean0.cwiseAbs().maxCoeff() < 0.02 * iw::djw_radius(3, 1.0));
  const double c = sq / n / 3.0;
  MESSAGE("djw E|z - v|^2 / (d / alpha^2) = " << c);
  CHECK(c < 30.0);
}

TEST_CASE("channels are deterministic given the stream") {
  const iw::PrivacyBudget b(1.0, 0.1);
  iw::RngStream r1(8), r2(8);
  const Vector v{{0.1, 0.2}};
  CHECK((iw::gauss_priv(v, 1.0, b, r1) - iw::gauss_priv(v, 1.0, b, r2))
            .norm() == 0.0);
  CHECK((iw::djw_l2_priv(v, 1.0, r1) - iw::djw_l2_priv(v, 1.0, r2)).norm() ==
        0.0);
}

TEST_CASE("ledger totals are additive") {
  iw::PrivacyLedger a, b;
  const iw::PrivacyBudget p(0.5, 0.1);
  a.add(iw::gaussian_entry("x", p, 1.0, 0, 10, true));
  a.add(iw::gaussian_entry("y", p, 1.0, 0, 10, true));
  b.add(iw::gaussian_entry("z", p, 1.0, 10, 20, true));
  CHECK(a.totals().alpha == doctest::Approx(1.0));
  CHECK(a.totals().beta == doctest::Approx(0.1));
  a.merge(b);
  CHECK(a.entries().size() == 3u);
  CHECK(a.totals().alpha == doctest::Approx(1.5));
  // Sequential over [0,10), parallel across [10,20).
  CHECK(a.per_record().alpha == doctest::Approx(1.0));
  double s = 0.0;
  for (const auto& e : a.entries()) s += e.alpha;
  CHECK(a.totals().alpha == s);
}

}  // TEST_SUITE
