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

#include <doctest.h>

#include "infoweight/errors.hpp"
#include "infoweight/linalg.hpp"
#include "infoweight/rng.hpp"

namespace iw = infoweight;
using iw::Matrix;
using iw::SymMatrix;
using iw::Vector;

namespace {

SymMatrix random_psd(int d, iw::RngStream& rng, double shift = 0.1) {
  Matrix a(d, d);
  for (int i = 0; i < d; ++i) a.col(i) = rng.normal_vector(d);
  return SymMatrix(a * a.transpose() / d + shift * Matrix::Identity(d, d));
}

Matrix random_orthogonal(int d, iw::RngStream& rng) {
  Matrix a(d, d);
  for (int i = 0; i < d; ++i) a.col(i) = rng.normal_vector(d);
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ() * Matrix::Identity(d, d);
}

}  // namespace

TEST_SUITE("linalg") {

TEST_CASE("symmetric storage is exact") {
  Matrix a(2, 2);
  a << 1.0, 0.1, 0.3, 2.0;
  SymMatrix s(a);
  CHECK(s(0, 1) == s(1, 0));
  CHECK(s(0, 1) == doctest::Approx(0.2));
  CHECK_THROWS_AS(SymMatrix(Matrix(2, 3)), iw::ArgumentError);
  CHECK_THROWS_AS(SymMatrix(Matrix(0, 0)), iw::ArgumentError);
}

TEST_CASE("eig_sym on diagonal input") {
  const auto es = iw::eig_sym(SymMatrix::Diagonal(Vector{{3.0, 1.0}}));
  CHECK(es.values(0) == doctest::Approx(3.0));
  CHECK(es.values(1) == doctest::Approx(1.0));
  CHECK((es.vectors.cwiseAbs() - Matrix::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("eig_sym on the swap matrix") {
  Matrix a(2, 2);
  a << 0, 1, 1, 0;
  const auto es = iw::eig_sym(SymMatrix(a));
  CHECK(es.values(0) == doctest::Approx(1.0));
  CHECK(es.values(1) == doctest::Approx(-1.0));
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(std::abs(es.vectors(0, 0)) - r) < 1e-12);
  CHECK(es.vectors(0, 0) * es.vectors(1, 0) > 0);
  CHECK(es.vectors(0, 1) * es.vectors(1, 1) < 0);
}

TEST_CASE("eig_sym reconstruction on random input") {
  iw::RngStream rng(1);
  for (int rep = 0; rep < 20; ++rep) {
    Matrix a(5, 5);
    for (int i = 0; i < 5; ++i) a.col(i) = rng.normal_vector(5);
    SymMatrix m(a);
    const auto es = iw::eig_sym(m);
    const Matrix v = es.vectors;
    CHECK((v.transpose() * v - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() <=
          1e-10);
    const Matrix rec = v * es.values.asDiagonal() * v.transpose();
    CHECK((rec - m.mat()).norm() <= 1e-8 * (1 + iw::op_norm(m)));
    for (int i = 0; i + 1 < 5; ++i) CHECK(es.values(i) >= es.values(i + 1));
  }
}

TEST_CASE("mat_power examples") {
  const SymMatrix m = SymMatrix::Diagonal(Vector{{4.0, 9.0}});
  CHECK((iw::mat_power(m, 0.5, 0).mat() -
         Matrix(Vector{{2.0, 3.0}}.asDiagonal()))
            .norm() < 1e-12);
  CHECK((iw::mat_power(m, -0.5, 0).mat() -
         Matrix(Vector{{0.5, 1.0 / 3.0}}.asDiagonal()))
            .norm() < 1e-12);
  const SymMatrix tiny = SymMatrix::Diagonal(Vector{{1e-20, 1.0}});
  const SymMatrix p = iw::mat_power(tiny, -0.5, 1e-12);
  CHECK(p(0, 0) == doctest::Approx(1e6));
  CHECK(p(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("mat_power errors") {
  const SymMatrix m = SymMatrix::Diagonal(Vector{{0.0, 1.0}});
  CHECK_THROWS_AS(iw::mat_power(m, -0.5, 0.0), iw::SingularityError);
  CHECK_THROWS_AS(iw::mat_power(m, 0.5, -1.0), iw::ArgumentError);
  CHECK_NOTHROW(iw::mat_power(m, 0.5, 0.0));
}

TEST_CASE("mat_power composes without clamping") {
  iw::RngStream rng(2);
  const double ps[] = {0.5, -0.5, -1.0, 2.0};
  for (int rep = 0; rep < 10; ++rep) {
    const SymMatrix m = random_psd(4, rng, 0.5);
    for (double p : ps) {
      for (double q : ps) {
        const Matrix lhs = iw::mat_power(iw::mat_power(m, p), q).mat();
        const Matrix rhs = iw::mat_power(m, p * q).mat();
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-8 * (1 + rhs.norm()));
      }
    }
  }
}

TEST_CASE("sym examples") {
  iw::RngStream rng(3);
  const Matrix q = random_orthogonal(4, rng);
  CHECK((iw::sym(q).mat() - Matrix::Identity(4, 4)).norm() < 1e-10);
  Matrix a(2, 2);
  a << 2, 0, 0, -3;
  CHECK((iw::sym(a).mat() - Matrix(Vector{{2.0, 3.0}}.asDiagonal())).norm() <
        1e-12);
}

TEST_CASE("sym is PSD and invariant under orthogonal left factors") {
  iw::RngStream rng(4);
  for (int rep = 0; rep < 20; ++rep) {
    const int d = 2 + rep % 4;
    const SymMatrix f = random_psd(d, rng);
    const SymMatrix u = random_psd(d, rng);
    const Matrix a = iw::mat_power(f, -0.5).mat() * u.mat();
    const SymMatrix s = iw::sym(a);
    CHECK(iw::min_eig(s) >= -1e-10);
    const Matrix q = random_orthogonal(d, rng);
    CHECK((iw::sym(q * a).mat() - s.mat()).cwiseAbs().maxCoeff() <= 1e-10);
    // sym(a)^2 == a^T a.
    CHECK((s.mat() * s.mat() - a.transpose() * a).norm() <=
          1e-9 * (1 + a.squaredNorm()));
  }
}

TEST_CASE("clip examples") {
  CHECK(iw::clip(1.5, 1) == 1.0);
  CHECK(iw::clip(-0.2, 1) == -0.2);
  CHECK(iw::clip(-7, 2) == -2.0);
}

TEST_CASE("project_ball examples") {
  CHECK((iw::project_ball(Vector{{3.0, 4.0}}, 5) - Vector{{3.0, 4.0}}).norm() ==
        0.0);
  CHECK((iw::project_ball(Vector{{3.0, 4.0}}, 1) - Vector{{0.6, 0.8}}).norm() <
        1e-15);
  CHECK(iw::project_ball(Vector::Zero(2), 1).norm() == 0.0);
}

TEST_CASE("project_ball is idempotent and 1-Lipschitz") {
  iw::RngStream rng(5);
  for (int rep = 0; rep < 200; ++rep) {
    const Vector a = rng.normal_vector(3) * 2.0;
    const Vector b = rng.normal_vector(3) * 2.0;
    const Vector pa = iw::project_ball(a, 1.0);
    CHECK((iw::project_ball(pa, 1.0) - pa).norm() <= 1e-15);
    CHECK((pa - iw::project_ball(b, 1.0)).norm() <= (a - b).norm() + 1e-15);
  }
}

TEST_CASE("psd certificate and Loewner order") {
  const SymMatrix a = SymMatrix::Diagonal(Vector{{1.0, 2.0}});
  const auto c = iw::certify_psd(a, 0.0);
  CHECK(c.psd());
  CHECK(c.min_eig <= c.max_eig);
  CHECK(iw::loewner_le(a, a * 2.0, 0.0));
  CHECK_FALSE(iw::loewner_le(a * 2.0, a, 1e-12));
  CHECK_FALSE(iw::certify_psd(SymMatrix::Diagonal(Vector{{-1e-3, 1.0}}), 1e-6)
                  .psd());
}

}  // TEST_SUITE
