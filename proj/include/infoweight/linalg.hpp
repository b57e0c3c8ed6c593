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

// Dense symmetric matrix kernels.

#ifndef INFOWEIGHT_LINALG_HPP_
#define INFOWEIGHT_LINALG_HPP_

#include <Eigen/Dense>

namespace infoweight {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr int kMaxDim = 4096;
inline constexpr double kEigenFloor = 1e-12;

// A real symmetric matrix. The constructor symmetrizes its argument as
// (A + A^T) / 2, so entries(i, j) == entries(j, i) holds bit-exactly.
class SymMatrix {
 public:
  SymMatrix() : m_(Matrix::Identity(1, 1)) {}
  explicit SymMatrix(const Matrix& a);

  static SymMatrix Identity(int d);
  static SymMatrix Zero(int d);
  static SymMatrix Diagonal(const Vector& diag);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& mat() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

  SymMatrix operator+(const SymMatrix& o) const;
  SymMatrix operator-(const SymMatrix& o) const;
  SymMatrix operator*(double s) const;
  Vector operator*(const Vector& v) const { return m_ * v; }

 private:
  Matrix m_;
};

struct EigenSystem {
  Vector values;   // descending
  Matrix vectors;  // orthonormal columns
};

struct PsdCertificate {
  SymMatrix matrix;
  double min_eig = 0.0;
  double max_eig = 0.0;
  double tol = 0.0;
  bool psd() const { return min_eig >= -tol; }
};

EigenSystem eig_sym(const SymMatrix& m);

// Eigenvalues are clamped to max(lambda_i, floor) before the power is
// applied. Any real p is accepted.
SymMatrix mat_power(const SymMatrix& m, double p, double floor = kEigenFloor);

// (A^T A)^{1/2}.
SymMatrix sym(const Matrix& a);

double clip(double v, double r);
Vector project_ball(const Vector& v, double r);

PsdCertificate certify_psd(const SymMatrix& m, double tol);
double min_eig(const SymMatrix& m);
double max_eig(const SymMatrix& m);
double op_norm(const SymMatrix& m);
// True iff a ⪯ b up to tol.
bool loewner_le(const SymMatrix& a, const SymMatrix& b, double tol);

// S^{1/2} A S^{1/2} for PSD S, symmetrized.
SymMatrix congruence(const SymMatrix& s_half, const SymMatrix& a);

}  // namespace infoweight

#endif  // INFOWEIGHT_LINALG_HPP_
