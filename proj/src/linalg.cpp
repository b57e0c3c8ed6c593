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

#include "infoweight/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "infoweight/errors.hpp"

namespace infoweight {

namespace {

void check_dim(Eigen::Index rows, Eigen::Index cols) {
  if (rows != cols || rows < 1 || rows > kMaxDim) {
    throw ArgumentError("SymMatrix: bad shape " + std::to_string(rows) + "x" +
                        std::to_string(cols));
  }
}

}  // namespace

SymMatrix::SymMatrix(const Matrix& a) {
  check_dim(a.rows(), a.cols());
  m_ = 0.5 * (a + a.transpose());
}

SymMatrix SymMatrix::Identity(int d) { return SymMatrix(Matrix::Identity(d, d)); }
SymMatrix SymMatrix::Zero(int d) { return SymMatrix(Matrix::Zero(d, d)); }
SymMatrix SymMatrix::Diagonal(const Vector& diag) {
  return SymMatrix(Matrix(diag.asDiagonal()));
}

SymMatrix SymMatrix::operator+(const SymMatrix& o) const {
  return SymMatrix(m_ + o.m_);
}
SymMatrix SymMatrix::operator-(const SymMatrix& o) const {
  return SymMatrix(m_ - o.m_);
}
SymMatrix SymMatrix::operator*(double s) const { return SymMatrix(m_ * s); }

EigenSystem eig_sym(const SymMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.mat());
  if (es.info() != Eigen::Success) {
    std::ostringstream os;
    os << "eig_sym: solver did not converge on matrix\n" << m.mat();
    throw ConvergenceError(os.str());
  }
  // Eigen returns ascending order.
  EigenSystem out;
  out.values = es.eigenvalues().reverse();
  out.vectors = es.eigenvectors().rowwise().reverse();
  return out;
}

SymMatrix mat_power(const SymMatrix& m, double p, double floor) {
  if (floor < 0) throw ArgumentError("mat_power: floor < 0");
  EigenSystem es = eig_sym(m);
  Vector lam(es.values.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    double v = std::max(es.values(i), floor);
    if (v <= 0 && p < 0) {
      throw SingularityError("mat_power: non-positive eigenvalue with p < 0");
    }
    if (v < 0) v = 0;
    lam(i) = (v == 0) ? 0.0 : std::pow(v, p);
  }
  return SymMatrix(es.vectors * lam.asDiagonal() * es.vectors.transpose());
}

SymMatrix sym(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const Matrix& v = svd.matrixV();
  return SymMatrix(v * svd.singularValues().asDiagonal() * v.transpose());
}

double clip(double v, double r) { return std::max(std::min(v, r), -r); }

Vector project_ball(const Vector& v, double r) {
  double n = v.norm();
  if (n <= r) return v;
  return v * (r / n);
}

PsdCertificate certify_psd(const SymMatrix& m, double tol) {
  EigenSystem es = eig_sym(m);
  PsdCertificate c;
  c.matrix = m;
  c.max_eig = es.values(0);
  c.min_eig = es.values(es.values.size() - 1);
  c.tol = tol;
  return c;
}

double min_eig(const SymMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.mat(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double max_eig(const SymMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.mat(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

double op_norm(const SymMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.mat(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

bool loewner_le(const SymMatrix& a, const SymMatrix& b, double tol) {
  return min_eig(b - a) >= -tol;
}

SymMatrix congruence(const SymMatrix& s_half, const SymMatrix& a) {
  return SymMatrix(s_half.mat() * a.mat() * s_half.mat());
}

}  // namespace infoweight
