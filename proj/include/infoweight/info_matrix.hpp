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

// Information-matrix operators and their exact and private solvers.

#ifndef INFOWEIGHT_INFO_MATRIX_HPP_
#define INFOWEIGHT_INFO_MATRIX_HPP_

#include <cstdint>
#include <vector>

#include "infoweight/covariates.hpp"
#include "infoweight/errors.hpp"
#include "infoweight/linalg.hpp"
#include "infoweight/privacy.hpp"

namespace infoweight {

enum class Model { kLDP, kDP };

struct InfoWeight {
  SymMatrix matrix;
  double lambda = 0.0;
  double gamma = 0.0;
  // |F(matrix) - I|_op under the operator used to produce it. For private
  // solvers this is the residual of the last privatized F.
  double residual = 0.0;
  Model model = Model::kLDP;
  bool non_private = false;
};

struct TraceStep {
  double min_eig = 0.0;
  double max_eig = 0.0;
  double residual = 0.0;
};

struct SpectralTrace {
  std::vector<TraceStep> steps;
};

struct SolveResult {
  InfoWeight weight;
  SpectralTrace trace;
};

class SolverConvergenceError : public ConvergenceError {
 public:
  SolverConvergenceError(const std::string& msg, SpectralTrace trace)
      : ConvergenceError(msg), trace_(std::move(trace)) {}
  const SpectralTrace& trace() const { return trace_; }

 private:
  SpectralTrace trace_;
};

SymMatrix apply_F_ldp(const SymMatrix& u, double lambda,
                      const MomentOracle& oracle);
SymMatrix apply_F_dp(const SymMatrix& w, double gamma, double lambda,
                     const MomentOracle& oracle);
SymMatrix apply_F(Model model, const SymMatrix& m, double gamma, double lambda,
                  const MomentOracle& oracle);

inline constexpr int kExactMaxIters = 60;
inline constexpr double kExactTol = 1e-9;

// U(k+1) = sym(F(U(k))^{-1/2} U(k)) from U(0) = init (identity by default).
SolveResult solve_exact(Model model, const MomentOracle& oracle, double lambda,
                        double gamma, int max_iters = kExactMaxIters,
                        double tol = kExactTol,
                        const SymMatrix* init = nullptr);

// True iff (1/2) I <= F <= 2 I.
bool sandwich_holds(const SymMatrix& f);

enum class LambdaSchedule { kRamp, kConstant };

struct SpectralOptions {
  // Constant C of the admissibility preconditions.
  double admissibility_c = 1.0;
  // Violations raise ConfigError instead of a warning.
  bool strict = false;
  // Force sigma = 0.
  bool noise_free = false;
  LambdaSchedule schedule = LambdaSchedule::kRamp;
  PrivacyLedger* ledger = nullptr;
  // Index of data row 0 in the caller's record numbering.
  std::int64_t record_offset = 0;
};

inline constexpr double kStrictAdmissibilityC = 4.0;

// C K B sigma sqrt((d + log(K / delta)) / N).
double min_lambda_ldp(int n_per_epoch, int d, double b, double sigma, int k,
                      double delta, double c);
// C sigma B sqrt(d + log(K / delta)) / N; the bound on gamma * lambda.
double min_gamma_lambda_dp(int n_per_epoch, int d, double b, double sigma,
                           int k, double delta, double c);
// max{ceil(loglog(1/lambda0)), floor_k} with lambda0 = lambda / (2K + 1)
// for the LDP schedule, lambda0 = lambda for DP.
int default_epochs_ldp(double lambda);
int default_epochs_dp(double lambda);

SolveResult spectral_iteration_ldp(const Dataset& data,
                                   const PrivacyBudget& budget, double delta,
                                   int k_epochs, double lambda, RngStream& rng,
                                   const SpectralOptions& opts = {});
SolveResult spectral_iteration_dp(const Dataset& data,
                                  const PrivacyBudget& budget, double delta,
                                  int k_epochs, double gamma, double lambda,
                                  RngStream& rng,
                                  const SpectralOptions& opts = {});

// tr(Sigma W*^2) / d at gamma = sqrt(log(1/beta) / (alpha^2 t)),
// lambda = 1 / sqrt(t).
double price_of_privacy(const MomentOracle& oracle, double t,
                        const PrivacyBudget& budget);

}  // namespace infoweight

#endif  // INFOWEIGHT_INFO_MATRIX_HPP_
