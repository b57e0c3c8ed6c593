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

// Covariate distributions, label mechanisms, datasets and moment oracles.

#ifndef INFOWEIGHT_COVARIATES_HPP_
#define INFOWEIGHT_COVARIATES_HPP_

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "infoweight/glm_link.hpp"
#include "infoweight/linalg.hpp"
#include "infoweight/rng.hpp"

namespace infoweight {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class CovKind {
  kFiniteSupport,
  kClippedGaussian,
  kSphereUniform,
  kProductRademacher
};

struct Atom {
  Vector x;
  double prob = 0.0;
};

class CovariateDistribution {
 public:
  static CovariateDistribution finite_support(std::vector<Atom> atoms,
                                              double bound);
  // x = L z with L L^T = sigma_gen, z standard normal, then projected onto
  // the ball of radius b.
  static CovariateDistribution clipped_gaussian(const SymMatrix& sigma_gen,
                                                double b);
  // Uniform on the sphere of radius b.
  static CovariateDistribution sphere_uniform(int d, double b);
  // Coordinates i.i.d. +-b/sqrt(d).
  static CovariateDistribution product_rademacher(int d, double b);

  CovKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double bound() const { return bound_; }
  bool finite() const { return kind_ == CovKind::kFiniteSupport; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  std::string id() const;

  Vector sample(RngStream& rng) const;

 private:
  CovKind kind_ = CovKind::kFiniteSupport;
  int dim_ = 1;
  double bound_ = 1.0;
  std::vector<Atom> atoms_;
  std::vector<double> cdf_;
  Matrix chol_;
};

enum class LabelKind { kRademacher, kBoundedNoise, kGlm };

struct LabelMechanism {
  Vector theta_star;
  LabelKind kind = LabelKind::kRademacher;
  double noise_level = 0.0;
  std::optional<GlmLink> link;
  // Additive perturbation a * cos(3 m) of the mean m = <x, theta*>.
  double misspec_amplitude = 0.0;

  static LabelMechanism rademacher(Vector theta);
  static LabelMechanism bounded_noise(Vector theta, double level);
  static LabelMechanism glm(Vector theta, GlmLink link);

  // E[y | x], always in [-1, 1].
  double mean(const Vector& x) const;
  double sample(const Vector& x, RngStream& rng) const;
  // Throws ArgumentError when the mechanism cannot emit |y| <= 1 on dist.
  void validate(const CovariateDistribution& dist) const;
};

struct Dataset {
  RowMatrix x;  // T x d
  Vector y;
  std::string dist_id;
  Vector theta_star;
  std::uint64_t seed = 0;
  // Declared norm bound B of the covariates; privacy calibration uses this,
  // never the observed norms.
  double bound = 1.0;

  int size() const { return static_cast<int>(x.rows()); }
  int dim() const { return static_cast<int>(x.cols()); }
  // Rows [begin, end).
  Dataset slice(int begin, int end) const;
};

Dataset sample_dataset(const CovariateDistribution& dist,
                       const LabelMechanism& labels, int t, RngStream& rng);

// Exact expectations over a weighted point set: either a finite-support
// distribution or a frozen empirical measure.
class MomentOracle {
 public:
  MomentOracle(RowMatrix points, Vector weights, bool exact);

  bool exact() const { return exact_; }
  int dim() const { return static_cast<int>(points_.cols()); }
  int size() const { return static_cast<int>(points_.rows()); }
  const RowMatrix& points() const { return points_; }
  const Vector& weights() const { return weights_; }

  SymMatrix covariance() const;
  double mean_abs_projection(const Vector& theta) const;
  // E[U x x^T U / |U x| 1{x != 0}].
  SymMatrix ldp_moment(const SymMatrix& u) const;
  // E[W x x^T W / (1 + gamma |W x|)].
  SymMatrix dp_moment(const SymMatrix& w, double gamma) const;
  // E[U x m(x) / |U x|] with m = E[y | x].
  Vector ldp_response(const SymMatrix& u, const LabelMechanism& labels) const;
  // E[W x m(x) / (1 + gamma |W x|)].
  Vector dp_response(const SymMatrix& w, double gamma,
                     const LabelMechanism& labels) const;

 private:
  RowMatrix points_;
  Vector weights_;
  bool exact_;
};

MomentOracle moment_oracle(const CovariateDistribution& dist);
MomentOracle frozen_empirical(const CovariateDistribution& dist, int samples,
                              RngStream& rng);

// Atoms B e_j with probability rho_j / B^2 plus the origin.
CovariateDistribution make_simple_distribution(const SymMatrix& cov_star,
                                               double b);
// (1 - rho) p + rho delta_e with e^T Sigma e = rho^2.
CovariateDistribution make_perturbed_distribution(
    const CovariateDistribution& p, double rho);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
double kappa_p(const CovariateDistribution& dist, double c);

}  // namespace infoweight

#endif  // INFOWEIGHT_COVARIATES_HPP_
