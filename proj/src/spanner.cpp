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

#include "infoweight/bandits.hpp"

namespace infoweight {

namespace {

double det_with_row(Matrix b, int i, const Vector& row) {
  b.row(i) = row.transpose();
  return std::abs(b.partialPivLu().determinant());
}

}  // namespace

std::vector<int> barycentric_spanner(const Matrix& v) {
  const int n = static_cast<int>(v.rows());
  if (n == 0) return {};
  Eigen::JacobiSVD<Matrix> svd(v, Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > 1e-10 * std::max(1.0, s(0))) ++r;
  }
  if (r == 0) return {0};
  // Coordinates in an orthonormal basis of the row span.
  const Matrix c = v * svd.matrixV().leftCols(r);
  Matrix b = Matrix::Identity(r, r);
  std::vector<int> idx(r, -1);
  for (int i = 0; i < r; ++i) {
    double best = -1.0;
    for (int j = 0; j < n; ++j) {
      const double dv = det_with_row(b, i, c.row(j).transpose());
      if (dv > best) {
        best = dv;
        idx[i] = j;
      }
    }
    b.row(i) = c.row(idx[i]);
  }
  // Swap while some replacement more than doubles |det|.
  for (int pass = 0; pass < 1000; ++pass) {
    const double cur = std::abs(b.partialPivLu().determinant());
    bool swapped = false;
    for (int i = 0; i < r && !swapped; ++i) {
      for (int j = 0; j < n; ++j) {
        if (det_with_row(b, i, c.row(j).transpose()) > 2.0 * cur) {
          b.row(i) = c.row(j);
          idx[i] = j;
          swapped = true;
          break;
        }
      }
    }
    if (!swapped) break;
  }
  return idx;
}

bool verify_spanner(const Matrix& v, const std::vector<int>& spanner,
                    double bound) {
  if (spanner.empty()) return v.rows() == 0 || v.norm() == 0.0;
  Matrix st(v.cols(), spanner.size());
  for (std::size_t k = 0; k < spanner.size(); ++k) {
    st.col(k) = v.row(spanner[k]).transpose();
  }
  const auto qr = st.colPivHouseholderQr();
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    const Vector target = v.row(i).transpose();
    const Vector coef = qr.solve(target);
    if ((st * coef - target).norm() > 1e-8 * (1.0 + target.norm())) {
      return false;
    }
    if (coef.cwiseAbs().maxCoeff() > bound) return false;
  }
  return true;
}

}  // namespace infoweight
