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

#include "infoweight/covariates.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "infoweight/errors.hpp"
#include "infoweight/log.hpp"

namespace infoweight {

CovariateDistribution CovariateDistribution::finite_support(
    std::vector<Atom> atoms, double bound) {
  if (atoms.empty()) throw ArgumentError("finite_support: no atoms");
  if (!(bound > 0)) throw ArgumentError("finite_support: bound <= 0");
  CovariateDistribution d;
  d.kind_ = CovKind::kFiniteSupport;
  d.dim_ = static_cast<int>(atoms[0].x.size());
  d.bound_ = bound;
  double total = 0.0;
  for (const auto& a : atoms) {
    if (a.x.size() != d.dim_) throw ArgumentError("finite_support: dims");
    if (a.prob < 0) throw ArgumentError("finite_support: negative mass");
    if (a.x.norm() > bound * (1 + 1e-12)) {
      throw ArgumentError("finite_support: atom outside the B-ball");
    }
    total += a.prob;
    d.cdf_.push_back(total);
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ArgumentError("finite_support: masses sum to " +
                        std::to_string(total));
  }
  d.atoms_ = std::move(atoms);
  return d;
}

CovariateDistribution CovariateDistribution::clipped_gaussian(
    const SymMatrix& sigma_gen, double b) {
  CovariateDistribution d;
  d.kind_ = CovKind::kClippedGaussian;
  d.dim_ = sigma_gen.dim();
  d.bound_ = b;
  d.chol_ = mat_power(sigma_gen, 0.5, 0.0).mat();
  return d;
}

CovariateDistribution CovariateDistribution::sphere_uniform(int d, double b) {
  CovariateDistribution out;
  out.kind_ = CovKind::kSphereUniform;
  out.dim_ = d;
  out.bound_ = b;
  return out;
}

CovariateDistribution CovariateDistribution::product_rademacher(int d,
                                                                double b) {
  CovariateDistribution out;
  out.kind_ = CovKind::kProductRademacher;
  out.dim_ = d;
  out.bound_ = b;
  return out;
}

std::string CovariateDistribution::id() const {
  std::ostringstream os;
  switch (kind_) {
    case CovKind::kFiniteSupport:
      os << "finite[" << atoms_.size() << "]";
      break;
    case CovKind::kClippedGaussian:
      os << "clipped_gaussian";
      break;
    case CovKind::kSphereUniform:
      os << "sphere";
      break;
    case CovKind::kProductRademacher:
      os << "rademacher";
      break;
  }
  os << "(d=" << dim_ << ",B=" << bound_ << ")";
  return os.str();
}

Vector CovariateDistribution::sample(RngStream& rng) const {
  switch (kind_) {
    case CovKind::kFiniteSupport: {
      double u = rng.uniform() * cdf_.back();
      auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
      size_t i = std::min<size_t>(it - cdf_.begin(), atoms_.size() - 1);
      return atoms_[i].x;
    }
    case CovKind::kClippedGaussian:
      return project_ball(chol_ * rng.normal_vector(dim_), bound_);
    case CovKind::kSphereUniform:
      return bound_ * rng.unit_sphere(dim_);
    case CovKind::kProductRademacher: {
      Vector x(dim_);
      const double s = bound_ / std::sqrt(static_cast<double>(dim_));
      for (int i = 0; i < dim_; ++i) x(i) = (rng() >> 63) ? s : -s;
      return x;
    }
  }
  return Vector::Zero(dim_);
}

LabelMechanism LabelMechanism::rademacher(Vector theta) {
  LabelMechanism l;
  l.theta_star = std::move(theta);
  l.kind = LabelKind::kRademacher;
  return l;
}

LabelMechanism LabelMechanism::bounded_noise(Vector theta, double level) {
  if (level < 0 || level > 1) {
    throw ArgumentError("bounded_noise: level must be in [0, 1]");
  }
  LabelMechanism l;
  l.theta_star = std::move(theta);
  l.kind = LabelKind::kBoundedNoise;
  l.noise_level = level;
  return l;
}

LabelMechanism LabelMechanism::glm(Vector theta, GlmLink link) {
  LabelMechanism l;
  l.theta_star = std::move(theta);
  l.kind = LabelKind::kGlm;
  l.link = std::move(link);
  return l;
}

double LabelMechanism::mean(const Vector& x) const {
  double m = x.dot(theta_star);
  if (kind == LabelKind::kGlm) m = link->nu(m);
  if (misspec_amplitude != 0.0) m += misspec_amplitude * std::cos(3.0 * m);
  return clip(m, 1.0);
}

double LabelMechanism::sample(const Vector& x, RngStream& rng) const {
  const double m = mean(x);
  if (kind == LabelKind::kBoundedNoise) {
    return m + noise_level * (1.0 - std::abs(m)) * (2.0 * rng.uniform() - 1.0);
  }
  return rng.uniform() < 0.5 * (1.0 + m) ? 1.0 : -1.0;
}

void LabelMechanism::validate(const CovariateDistribution& dist) const {
  if (theta_star.size() != dist.dim()) {
    throw ArgumentError("labels: theta dimension mismatch");
  }
  if (theta_star.norm() > 1.0 + 1e-12) {
    throw ArgumentError("labels: |theta*| > 1");
  }
  if (kind == LabelKind::kGlm) return;
  auto ok = [&](const Vector& x) { return std::abs(x.dot(theta_star)) <= 1.0 + 1e-12; };
  if (dist.finite()) {
    for (const auto& a : dist.atoms()) {
      if (!ok(a.x)) {
        throw ArgumentError("labels: |<x, theta*>| > 1 on a support point");
      }
    }
  } else if (dist.bound() * theta_star.norm() > 1.0 + 1e-12) {
    throw ArgumentError("labels: B |theta*| > 1");
  }
}

Dataset Dataset::slice(int begin, int end) const {
  Dataset out;
  out.x = x.middleRows(begin, end - begin);
  out.y = y.segment(begin, end - begin);
  out.dist_id = dist_id;
  out.theta_star = theta_star;
  out.seed = seed;
  out.bound = bound;
  return out;
}

Dataset sample_dataset(const CovariateDistribution& dist,
                       const LabelMechanism& labels, int t, RngStream& rng) {
  if (t < 1) throw ArgumentError("sample_dataset: t < 1");
  Dataset ds;
  ds.x.resize(t, dist.dim());
  ds.y.resize(t);
  for (int i = 0; i < t; ++i) {
    Vector x = dist.sample(rng);
    ds.x.row(i) = x.transpose();
    ds.y(i) = labels.sample(x, rng);
  }
  ds.dist_id = dist.id();
  ds.theta_star = labels.theta_star;
  ds.seed = rng.seed();
  ds.bound = dist.bound();
  return ds;
}

MomentOracle::MomentOracle(RowMatrix points, Vector weights, bool exact)
    : points_(std::move(points)), weights_(std::move(weights)), exact_(exact) {
  if (points_.rows() != weights_.size() || points_.rows() == 0) {
    throw ArgumentError("MomentOracle: shape mismatch");
  }
}

SymMatrix MomentOracle::covariance() const {
  return SymMatrix(points_.transpose() * weights_.asDiagonal() * points_);
}

double MomentOracle::mean_abs_projection(const Vector& theta) const {
  return weights_.dot((points_ * theta).cwiseAbs());
}

SymMatrix MomentOracle::ldp_moment(const SymMatrix& u) const {
  RowMatrix ux = points_ * u.mat();  // rows are (U x)^T
  Vector c(ux.rows());
  for (Eigen::Index i = 0; i < ux.rows(); ++i) {
    double n = ux.row(i).norm();
    c(i) = n > 0.0 ? weights_(i) / n : 0.0;
  }
  return SymMatrix(ux.transpose() * c.asDiagonal() * ux);
}

SymMatrix MomentOracle::dp_moment(const SymMatrix& w, double gamma) const {
  RowMatrix wx = points_ * w.mat();
  Vector c(wx.rows());
  for (Eigen::Index i = 0; i < wx.rows(); ++i) {
    c(i) = weights_(i) / (1.0 + gamma * wx.row(i).norm());
  }
  return SymMatrix(wx.transpose() * c.asDiagonal() * wx);
}

Vector MomentOracle::ldp_response(const SymMatrix& u,
                                  const LabelMechanism& labels) const {
  Vector out = Vector::Zero(dim());
  for (Eigen::Index i = 0; i < points_.rows(); ++i) {
    Vector x = points_.row(i).transpose();
    Vector ux = u * x;
    double n = ux.norm();
    if (n > 0.0) out += weights_(i) * labels.mean(x) / n * ux;
  }
  return out;
}

Vector MomentOracle::dp_response(const SymMatrix& w, double gamma,
                                 const LabelMechanism& labels) const {
  Vector out = Vector::Zero(dim());
  for (Eigen::Index i = 0; i < points_.rows(); ++i) {
    Vector x = points_.row(i).transpose();
    Vector wx = w * x;
    out += weights_(i) * labels.mean(x) / (1.0 + gamma * wx.norm()) * wx;
  }
  return out;
}

MomentOracle moment_oracle(const CovariateDistribution& dist) {
  if (!dist.finite()) {
    throw UnsupportedOracleError(
        "moment_oracle: exact moments need a finite-support distribution; "
        "use a frozen empirical measure");
  }
  const auto& atoms = dist.atoms();
  RowMatrix pts(atoms.size(), dist.dim());
  Vector w(atoms.size());
  for (size_t i = 0; i < atoms.size(); ++i) {
    pts.row(i) = atoms[i].x.transpose();
    w(i) = atoms[i].prob;
  }
  return MomentOracle(std::move(pts), std::move(w), true);
}

MomentOracle frozen_empirical(const CovariateDistribution& dist, int samples,
                              RngStream& rng) {
  RowMatrix pts(samples, dist.dim());
  for (int i = 0; i < samples; ++i) pts.row(i) = dist.sample(rng).transpose();
  return MomentOracle(std::move(pts),
                      Vector::Constant(samples, 1.0 / samples), false);
}

CovariateDistribution make_simple_distribution(const SymMatrix& cov_star,
                                               double b) {
  const double tr = cov_star.mat().trace();
  if (tr > b * b * (1 + 1e-12)) {
    throw ArgumentError("make_simple_distribution: tr(Sigma) > B^2");
  }
  EigenSystem es = eig_sym(cov_star);
  std::vector<Atom> atoms;
  double used = 0.0;
  for (Eigen::Index j = 0; j < es.values.size(); ++j) {
    double rho = std::max(es.values(j), 0.0);
    if (rho == 0.0) continue;
    double p = rho / (b * b);
    atoms.push_back({b * es.vectors.col(j), p});
    used += p;
  }
  double rest = 1.0 - used;
  if (rest > 0.0) atoms.push_back({Vector::Zero(cov_star.dim()), rest});
  return CovariateDistribution::finite_support(std::move(atoms), b);
}

CovariateDistribution make_perturbed_distribution(
    const CovariateDistribution& p, double rho) {
  if (!p.finite()) {
    throw ArgumentError("make_perturbed_distribution: needs finite support");
  }
  if (rho == 0.0) {
    warn("make_perturbed_distribution: rho = 0 leaves p unchanged");
    return p;
  }
  SymMatrix sigma = moment_oracle(p).covariance();
  EigenSystem es = eig_sym(sigma);
  const double lmax = es.values(0);
  const double lmin = es.values(es.values.size() - 1);
  const double r2 = rho * rho;
  const double tol = 1e-12;
  if (rho < 0 || rho > 1 || r2 < lmin - tol || r2 > lmax + tol) {
    std::ostringstream os;
    os << "make_perturbed_distribution: no unit e with e^T Sigma e = rho^2; "
       << "feasible rho interval is [" << std::sqrt(std::max(lmin, 0.0))
       << ", " << std::sqrt(std::max(lmax, 0.0)) << "] intersected with [0, 1]";
    throw ArgumentError(os.str());
  }
  const Vector vmax = es.vectors.col(0);
  const Vector vmin = es.vectors.col(es.values.size() - 1);
  auto dir = [&](double s) -> Vector {
    Vector e = std::cos(s) * vmin + std::sin(s) * vmax;
    return e / e.norm();
  };
  auto q = [&](double s) {
    Vector e = dir(s);
    return e.dot(sigma * e);
  };
  double lo = 0.0, hi = M_PI / 2;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    double mid = 0.5 * (lo + hi);
    if (q(mid) < r2) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  Vector e = dir(0.5 * (lo + hi));
  std::vector<Atom> atoms;
  bool merged = false;
  for (const auto& a : p.atoms()) {
    Atom b{a.x, (1.0 - rho) * a.prob};
    if (!merged && (a.x - e).norm() <= 1e-12) {
      b.prob += rho;
      merged = true;
    }
    atoms.push_back(std::move(b));
  }
  if (!merged) atoms.push_back({e, rho});
  return CovariateDistribution::finite_support(std::move(atoms),
                                               std::max(p.bound(), 1.0));
}

double kappa_p(const CovariateDistribution& dist, double c) {
  if (!(c > 0 && c <= 1)) throw ArgumentError("kappa_p: c not in (0, 1]");
  MomentOracle oracle = moment_oracle(dist);
  SymMatrix sigma = oracle.covariance();
  EigenSystem es = eig_sym(sigma);
  const double cut = 1e-12 * std::max(1.0, es.values(0));
  Vector inv(es.values.size());
  for (Eigen::Index i = 0; i < inv.size(); ++i) {
    inv(i) = es.values(i) > cut ? 1.0 / es.values(i) : 0.0;
  }
  Matrix pinv = es.vectors * inv.asDiagonal() * es.vectors.transpose();
  const auto& pts = oracle.points();
  const int n = oracle.size();
  std::vector<double> norms(n);
  for (int i = 0; i < n; ++i) {
    Vector x = pts.row(i).transpose();
    norms[i] = std::sqrt(std::max(0.0, x.dot(pinv * x)));
  }
  std::vector<double> cand = norms;
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  const double tol = 1e-10 * (1.0 + es.values(0));
  for (double m : cand) {
    Matrix acc = Matrix::Zero(dist.dim(), dist.dim());
    for (int i = 0; i < n; ++i) {
      if (norms[i] <= m * (1 + 1e-12)) {
        Vector x = pts.row(i).transpose();
        acc += oracle.weights()(i) * x * x.transpose();
      }
    }
    if (min_eig(SymMatrix(acc - c * sigma.mat())) >= -tol) return m;
  }
  return kInfinity;
}

}  // namespace infoweight
