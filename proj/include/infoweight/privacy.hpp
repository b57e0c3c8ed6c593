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

// Privatization channels and a composition ledger.

#ifndef INFOWEIGHT_PRIVACY_HPP_
#define INFOWEIGHT_PRIVACY_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "infoweight/linalg.hpp"
#include "infoweight/rng.hpp"

namespace infoweight {

class PrivacyBudget {
 public:
  PrivacyBudget(double alpha, double beta);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  // 4 sqrt(log(2.5 / beta)) / alpha.
  double sigma() const;

  PrivacyBudget scaled_alpha(double factor) const {
    return PrivacyBudget(alpha_ * factor, beta_);
  }

 private:
  double alpha_;
  double beta_;
};

// One mechanism invocation class. The mechanism touches records in
// [record_begin, record_end); when `local` it is applied to each record
// separately, otherwise once to a statistic of the whole range.
struct LedgerEntry {
  std::string mechanism;
  double alpha = 0.0;
  double beta = 0.0;
  double delta = 0.0;
  std::int64_t record_begin = 0;
  std::int64_t record_end = 0;
  bool local = false;
};

struct PrivacyTotals {
  double alpha = 0.0;
  double beta = 0.0;
};

class PrivacyLedger {
 public:
  void add(LedgerEntry e);
  void merge(const PrivacyLedger& other);

  const std::vector<LedgerEntry>& entries() const { return entries_; }
  // Plain sums over entries.
  PrivacyTotals totals() const { return totals_; }
  // Worst record: sums entries touching a record (sequential composition)
  // and maximizes over records (parallel composition over disjoint ranges).
  PrivacyTotals per_record() const;

 private:
  std::vector<LedgerEntry> entries_;
  PrivacyTotals totals_;
};

// Gaussian channel: v + N(0, (sigma * delta)^2 I). Recorded as
// (alpha, beta / 2)-DP.
Vector gauss_priv(const Vector& v, double delta, const PrivacyBudget& budget,
                  RngStream& rng);
// Symmetric noise with independent entries for i <= j.
SymMatrix sym_gauss_priv(const SymMatrix& m, double delta,
                         const PrivacyBudget& budget, RngStream& rng);
// Entrywise Gaussian noise on a general matrix (Frobenius-norm radius delta).
Matrix mat_gauss_priv(const Matrix& m, double delta,
                      const PrivacyBudget& budget, RngStream& rng);

double laplace_priv(double v, double sensitivity, double eps, RngStream& rng);

// Pure alpha-LDP unbiased channel for vectors in the unit ball.
Vector djw_l2_priv(const Vector& v, double alpha, RngStream& rng);
// Norm of every output of djw_l2_priv in dimension d.
double djw_radius(int d, double alpha);

LedgerEntry gaussian_entry(const std::string& name, const PrivacyBudget& b,
                           double delta, std::int64_t begin, std::int64_t end,
                           bool local);

}  // namespace infoweight

#endif  // INFOWEIGHT_PRIVACY_HPP_
