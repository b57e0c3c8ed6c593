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

#include "infoweight/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "infoweight/errors.hpp"
#include "infoweight/log.hpp"

namespace infoweight {

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

template <class T>
T get_or(const toml::table& t, const std::string& key, const std::string& path,
         T def) {
  const toml::node* n = t.get(key);
  if (!n) return def;
  if (auto v = n->value<T>()) return *v;
  throw ConfigError(join(path, key) + ": wrong type");
}

std::vector<double> get_vec(const toml::table& t, const std::string& key,
                            const std::string& path) {
  std::vector<double> out;
  const toml::node* n = t.get(key);
  if (!n) return out;
  const toml::array* a = n->as_array();
  if (!a) throw ConfigError(join(path, key) + ": expected an array");
  for (std::size_t i = 0; i < a->size(); ++i) {
    auto v = (*a)[i].value<double>();
    if (!v) {
      throw ConfigError(join(path, key) + "[" + std::to_string(i) +
                        "]: expected a number");
    }
    out.push_back(*v);
  }
  return out;
}

std::vector<std::vector<double>> get_mat(const toml::table& t,
                                         const std::string& key,
                                         const std::string& path) {
  std::vector<std::vector<double>> out;
  const toml::node* n = t.get(key);
  if (!n) return out;
  const toml::array* a = n->as_array();
  if (!a) throw ConfigError(join(path, key) + ": expected an array of rows");
  for (std::size_t i = 0; i < a->size(); ++i) {
    const toml::array* row = (*a)[i].as_array();
    const std::string p = join(path, key) + "[" + std::to_string(i) + "]";
    if (!row) throw ConfigError(p + ": expected an array");
    std::vector<double> r;
    for (std::size_t k = 0; k < row->size(); ++k) {
      auto v = (*row)[k].value<double>();
      if (!v) throw ConfigError(p + ": expected numbers");
      r.push_back(*v);
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::string> get_strings(const toml::table& t,
                                     const std::string& key,
                                     const std::string& path) {
  std::vector<std::string> out;
  const toml::node* n = t.get(key);
  if (!n) return out;
  const toml::array* a = n->as_array();
  if (!a) throw ConfigError(join(path, key) + ": expected an array");
  for (const auto& e : *a) {
    auto v = e.value<std::string>();
    if (!v) throw ConfigError(join(path, key) + ": expected strings");
    out.push_back(*v);
  }
  return out;
}

const toml::table* sub_table(const toml::table& t, const std::string& key,
                             const std::string& path) {
  const toml::node* n = t.get(key);
  if (!n) return nullptr;
  const toml::table* s = n->as_table();
  if (!s) throw ConfigError(join(path, key) + ": expected a table");
  return s;
}

toml::array to_toml_array(const std::vector<double>& v) {
  toml::array a;
  for (double x : v) a.push_back(x);
  return a;
}

toml::array to_toml_matrix(const std::vector<std::vector<double>>& m) {
  toml::array a;
  for (const auto& r : m) a.push_back(to_toml_array(r));
  return a;
}

Vector to_vector(const std::vector<double>& v) {
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out(i) = v[i];
  return out;
}

Matrix to_matrix(const std::vector<std::vector<double>>& m,
                 const std::string& what) {
  if (m.empty()) throw ConfigError(what + ": empty matrix");
  Matrix out(m.size(), m[0].size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i].size() != m[0].size()) throw ConfigError(what + ": ragged rows");
    for (std::size_t k = 0; k < m[i].size(); ++k) out(i, k) = m[i][k];
  }
  return out;
}

}  // namespace

DistributionSpec distribution_from_toml(const toml::table& t,
                                        const std::string& path) {
  DistributionSpec s;
  s.type = get_or<std::string>(t, "type", path, s.type);
  s.dim = static_cast<int>(get_or<std::int64_t>(t, "dim", path, 1));
  s.bound = get_or<double>(t, "bound", path, 1.0);
  s.atoms = get_mat(t, "atoms", path);
  s.probs = get_vec(t, "probs", path);
  s.eigenvalues = get_vec(t, "eigenvalues", path);
  s.cov = get_mat(t, "cov", path);
  s.rho = get_or<double>(t, "rho", path, 0.0);
  if (const toml::table* b = sub_table(t, "base", path)) {
    s.base = std::make_shared<DistributionSpec>(
        distribution_from_toml(*b, join(path, "base")));
  }
  static const char* kTypes[] = {"finite",     "simple",     "perturbed",
                                 "sphere",     "rademacher", "clipped_gaussian"};
  if (std::find(std::begin(kTypes), std::end(kTypes), s.type) ==
      std::end(kTypes)) {
    throw ConfigError(join(path, "type") + ": unknown distribution '" +
                      s.type + "'");
  }
  if (s.type == "perturbed" && !s.base) {
    throw ConfigError(join(path, "base") + ": required for perturbed");
  }
  return s;
}

toml::table distribution_to_toml(const DistributionSpec& s) {
  toml::table t;
  t.insert("type", s.type);
  t.insert("dim", s.dim);
  t.insert("bound", s.bound);
  if (!s.atoms.empty()) t.insert("atoms", to_toml_matrix(s.atoms));
  if (!s.probs.empty()) t.insert("probs", to_toml_array(s.probs));
  if (!s.eigenvalues.empty()) {
    t.insert("eigenvalues", to_toml_array(s.eigenvalues));
  }
  if (!s.cov.empty()) t.insert("cov", to_toml_matrix(s.cov));
  if (s.type == "perturbed") t.insert("rho", s.rho);
  if (s.base) t.insert("base", distribution_to_toml(*s.base));
  return t;
}

CovariateDistribution build_distribution(const DistributionSpec& s) {
  if (s.type == "finite") {
    if (s.atoms.size() != s.probs.size() || s.atoms.empty()) {
      throw ConfigError("distribution: atoms and probs must match");
    }
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < s.atoms.size(); ++i) {
      atoms.push_back({to_vector(s.atoms[i]), s.probs[i]});
    }
    return CovariateDistribution::finite_support(std::move(atoms), s.bound);
  }
  if (s.type == "simple") {
    if (s.eigenvalues.empty()) {
      throw ConfigError("distribution.eigenvalues: required for simple");
    }
    return make_simple_distribution(
        SymMatrix(Matrix(to_vector(s.eigenvalues).asDiagonal())), s.bound);
  }
  if (s.type == "perturbed") {
    return make_perturbed_distribution(build_distribution(*s.base), s.rho);
  }
  if (s.type == "sphere") {
    return CovariateDistribution::sphere_uniform(s.dim, s.bound);
  }
  if (s.type == "rademacher") {
    return CovariateDistribution::product_rademacher(s.dim, s.bound);
  }
  return CovariateDistribution::clipped_gaussian(
      SymMatrix(to_matrix(s.cov, "distribution.cov")), s.bound);
}

LabelMechanism build_labels(const LabelSpec& s, double bound) {
  Vector theta = to_vector(s.theta);
  LabelMechanism m;
  if (s.kind == "rademacher") {
    m = LabelMechanism::rademacher(theta);
  } else if (s.kind == "bounded_noise") {
    m = LabelMechanism::bounded_noise(theta, s.noise);
  } else if (s.kind == "glm") {
    GlmLink link = s.link == "logistic" ? GlmLink::logistic_scaled(bound)
                                        : GlmLink::identity();
    m = LabelMechanism::glm(theta, link);
  } else {
    throw ConfigError("labels.kind: unknown '" + s.kind + "'");
  }
  m.misspec_amplitude = s.misspec;
  return m;
}

BanditEnv build_env(const BanditSpec& s) {
  RngStream rng(s.env_seed);
  if (s.env == "random_sphere") {
    return BanditEnv::random_sphere(s.dim, s.actions, s.contexts, rng);
  }
  if (s.env == "log_uniform_gaps") {
    return BanditEnv::log_uniform_gaps(s.dim, s.actions, s.contexts, s.g_min,
                                       s.g_max, rng);
  }
  if (s.env == "gap") {
    return BanditEnv::gap_instance(s.dim, s.actions, s.contexts, s.delta_min,
                                   rng);
  }
  if (s.env == "sphere_generative") {
    return BanditEnv::sphere_generative(s.dim, s.actions, rng);
  }
  throw ConfigError("bandit.env: unknown '" + s.env + "'");
}

ExperimentConfig parse_config(const toml::table& t) {
  ExperimentConfig c;
  c.schema_version = static_cast<int>(
      get_or<std::int64_t>(t, "schema_version", "", kSchemaVersion));
  if (c.schema_version != kSchemaVersion) {
    throw ConfigError("schema_version: unsupported version " +
                      std::to_string(c.schema_version));
  }
  c.kind = get_or<std::string>(t, "kind", "", c.kind);
  c.seed = static_cast<std::uint64_t>(get_or<std::int64_t>(t, "seed", "", 1));
  c.replications =
      static_cast<int>(get_or<std::int64_t>(t, "replications", "", 1));
  for (double v : get_vec(t, "T", "")) c.t_grid.push_back(int(std::lround(v)));
  c.out = get_or<std::string>(t, "out", "", c.out);
  c.timing = get_or<bool>(t, "timing", "", c.timing);
  c.threads = static_cast<int>(get_or<std::int64_t>(t, "threads", "", 1));
  if (c.replications < 1) throw ConfigError("replications: must be >= 1");
  for (std::size_t i = 0; i < c.t_grid.size(); ++i) {
    if (c.t_grid[i] < 1 || (i > 0 && c.t_grid[i] <= c.t_grid[i - 1])) {
      throw ConfigError("T: grid must be positive and strictly increasing");
    }
  }
  if (const toml::table* d = sub_table(t, "distribution", "")) {
    c.distribution = distribution_from_toml(*d, "distribution");
  }
  if (const toml::table* l = sub_table(t, "labels", "")) {
    c.labels.kind = get_or<std::string>(*l, "kind", "labels", c.labels.kind);
    c.labels.theta = get_vec(*l, "theta", "labels");
    c.labels.noise = get_or<double>(*l, "noise", "labels", 0.0);
    c.labels.link = get_or<std::string>(*l, "link", "labels", "identity");
    c.labels.misspec = get_or<double>(*l, "misspec", "labels", 0.0);
  }
  if (const toml::table* p = sub_table(t, "privacy", "")) {
    c.alpha = get_or<double>(*p, "alpha", "privacy", c.alpha);
    c.beta = get_or<double>(*p, "beta", "privacy", c.beta);
    c.delta = get_or<double>(*p, "delta", "privacy", c.delta);
  }
  if (const toml::table* e = sub_table(t, "estimator", "")) {
    const std::string p = "estimator";
    c.algo = get_or<std::string>(*e, "algo", p, c.algo);
    auto m = get_strings(*e, "metrics", p);
    if (!m.empty()) c.metrics = m;
    auto& o = c.estimator;
    o.paper_constants = get_or<bool>(*e, "paper_constants", p, false);
    o.noise_free = get_or<bool>(*e, "noise_free", p, false);
    o.k_epochs = static_cast<int>(get_or<std::int64_t>(*e, "k_epochs", p, 0));
    o.lambda = get_or<double>(*e, "lambda", p, 0.0);
    o.gamma = get_or<double>(*e, "gamma", p, 0.0);
    o.gamma_scale = get_or<double>(*e, "gamma_scale", p, 1.0);
    o.lambda_scale = get_or<double>(*e, "lambda_scale", p, 1.0);
    o.l1_mode = get_or<bool>(*e, "l1_mode", p, false);
    o.allow_unstable = get_or<bool>(*e, "allow_unstable", p, false);
    o.allow_inadmissible = get_or<bool>(*e, "allow_inadmissible", p, false);
    o.spectral.admissibility_c =
        get_or<double>(*e, "admissibility_c", p, o.spectral.admissibility_c);
    o.spectral.strict = get_or<bool>(*e, "strict", p, false);
    c.tau = get_or<double>(*e, "tau", p, c.tau);
    c.ridge = get_or<double>(*e, "ridge", p, c.ridge);
    c.eta = get_or<double>(*e, "eta", p, c.eta);
  }
  for (const auto& m : c.metrics) {
    const auto& reg = metric_registry();
    if (std::find(reg.begin(), reg.end(), m) == reg.end()) {
      throw ConfigError("estimator.metrics: unknown metric '" + m + "'");
    }
  }
  if (const toml::table* b = sub_table(t, "bandit", "")) {
    const std::string p = "bandit";
    auto& s = c.bandit;
    s.env = get_or<std::string>(*b, "env", p, s.env);
    s.dim = static_cast<int>(get_or<std::int64_t>(*b, "dim", p, s.dim));
    s.actions =
        static_cast<int>(get_or<std::int64_t>(*b, "actions", p, s.actions));
    s.contexts =
        static_cast<int>(get_or<std::int64_t>(*b, "contexts", p, s.contexts));
    s.g_min = get_or<double>(*b, "g_min", p, s.g_min);
    s.g_max = get_or<double>(*b, "g_max", p, s.g_max);
    s.delta_min = get_or<double>(*b, "delta_min", p, s.delta_min);
    s.env_seed = static_cast<std::uint64_t>(
        get_or<std::int64_t>(*b, "env_seed", p, std::int64_t(s.env_seed)));
    auto& e = c.elimination;
    e.lambda_c = get_or<double>(*b, "lambda_c", p, e.lambda_c);
    e.gamma_c = get_or<double>(*b, "gamma_c", p, e.gamma_c);
    e.restrict_max = get_or<bool>(*b, "restrict_max", p, e.restrict_max);
    e.gap_diag = get_or<double>(*b, "gap_diag", p, e.gap_diag);
  }
  if (const toml::table* s = sub_table(t, "solve", "")) {
    c.model = get_or<std::string>(*s, "model", "solve", c.model);
    c.lambda = get_or<double>(*s, "lambda", "solve", c.lambda);
    c.gamma = get_or<double>(*s, "gamma", "solve", c.gamma);
    if (c.model != "ldp" && c.model != "dp") {
      throw ConfigError("solve.model: expected 'ldp' or 'dp'");
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  try {
    return parse_config(toml::parse_file(path));
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << path << ":" << e.source().begin.line << ": " << e.description();
    throw ConfigError(os.str());
  }
}

Json config_to_json(const ExperimentConfig& c) {
  std::ostringstream dist;
  dist << toml::json_formatter{distribution_to_toml(c.distribution)};
  const auto& o = c.estimator;
  return {
      {"schema_version", c.schema_version},
      {"kind", c.kind},
      {"seed", c.seed},
      {"replications", c.replications},
      {"T", c.t_grid},
      {"out", c.out},
      {"timing", c.timing},
      {"distribution", Json::parse(dist.str())},
      {"labels",
       {{"kind", c.labels.kind},
        {"theta", c.labels.theta},
        {"noise", c.labels.noise},
        {"link", c.labels.link},
        {"misspec", c.labels.misspec}}},
      {"privacy", {{"alpha", c.alpha}, {"beta", c.beta}, {"delta", c.delta}}},
      {"estimator",
       {{"algo", c.algo},
        {"metrics", c.metrics},
        {"paper_constants", o.paper_constants},
        {"noise_free", o.noise_free},
        {"k_epochs", o.k_epochs},
        {"lambda", o.lambda},
        {"gamma", o.gamma},
        {"gamma_scale", o.gamma_scale},
        {"lambda_scale", o.lambda_scale},
        {"l1_mode", o.l1_mode},
        {"allow_unstable", o.allow_unstable},
        {"allow_inadmissible", o.allow_inadmissible},
        {"admissibility_c", o.spectral.admissibility_c},
        {"strict", o.spectral.strict},
        {"tau", c.tau},
        {"ridge", c.ridge},
        {"eta", c.eta}}},
      {"bandit",
       {{"env", c.bandit.env},
        {"dim", c.bandit.dim},
        {"actions", c.bandit.actions},
        {"contexts", c.bandit.contexts},
        {"g_min", c.bandit.g_min},
        {"g_max", c.bandit.g_max},
        {"delta_min", c.bandit.delta_min},
        {"env_seed", c.bandit.env_seed},
        {"lambda_c", c.elimination.lambda_c},
        {"gamma_c", c.elimination.gamma_c},
        {"restrict_max", c.elimination.restrict_max},
        {"gap_diag", c.elimination.gap_diag}}},
      {"solve", {{"model", c.model}, {"lambda", c.lambda}, {"gamma", c.gamma}}}};
}

const std::vector<std::string>& metric_registry() {
  static const std::vector<std::string> kMetrics = {
      "l2_err",  "sigma_err", "l1_err",   "uinv_err", "winv_err",
      "regret",  "residual",  "pop_ratio", "slope",   "error"};
  return kMetrics;
}

void write_csv_header(std::ostream& os) {
  os << "run_id,seed,T,algo,metric,value,wall_ms\n";
}

void write_csv_row(std::ostream& os, const ResultRow& r) {
  std::ostringstream v;
  v << std::setprecision(17) << r.value;
  os << r.run_id << ',' << r.seed << ',' << r.t << ',' << r.algo << ','
     << r.metric << ',' << v.str() << ',' << std::fixed << std::setprecision(3)
     << r.wall_ms << std::defaultfloat << '\n';
}

EstimateReport run_estimator(const ExperimentConfig& c, const Dataset& data,
                             const MomentOracle* oracle, RngStream& rng) {
  const PrivacyBudget budget(c.alpha, c.beta);
  const auto& o = c.estimator;
  const std::string& a = c.algo;
  auto need_oracle = [&]() -> const MomentOracle& {
    if (!oracle) throw ConfigError("estimator.algo: '" + a + "' needs an oracle");
    return *oracle;
  };
  auto link = [&]() {
    return c.labels.link == "logistic" ? GlmLink::logistic_scaled(data.bound)
                                       : GlmLink::identity();
  };
  if (a == "simple_1d") return simple_ldp_1d(data, c.alpha, rng, o);
  if (a == "ssp_central") {
    return ssp_ols(data, budget, c.tau, c.ridge, SspMode::kCentral, rng, o);
  }
  if (a == "ssp_local") {
    return ssp_ols(data, budget, c.tau, c.ridge, SspMode::kLocal, rng, o);
  }
  if (a == "iw_ldp") return iw_regression_ldp(data, budget, c.delta, rng, o);
  if (a == "iw_dp") return iw_regression_dp(data, budget, c.delta, rng, o);
  if (a == "iw_ldp_fixed") {
    return iw_regression_ldp_fixed_p(data, need_oracle(), c.alpha, rng, o);
  }
  if (a == "iw_dp_fixed") {
    return iw_regression_dp_fixed_p(data, need_oracle(), budget, rng, o);
  }
  if (a == "glm_ldp") return glm_iw_ldp(data, link(), budget, c.delta, rng, o);
  if (a == "glm_dp") return glm_iw_dp(data, link(), budget, c.delta, rng, o);
  if (a == "dp_sgd") return dp_sgd_improper(data, budget, c.eta, c.delta, rng, o);
  if (a == "clipped_sgd") {
    return ldp_clipped_sgd(data, budget, o.k_epochs, c.delta, rng, o);
  }
  throw ConfigError("estimator.algo: unknown '" + a + "'");
}

namespace {

bool is_bandit_algo(const std::string& a) {
  return a == "elim_jdp" || a == "elim_ldp" || a == "squarecb_jdp" ||
         a == "squarecb_ldp";
}

RegretTrace run_bandit_algo(const ExperimentConfig& c, const BanditEnv& env,
                            int t, RngStream& rng) {
  const PrivacyBudget budget(c.alpha, c.beta);
  if (c.algo == "elim_jdp" || c.algo == "elim_ldp") {
    EliminationConfig e = c.elimination;
    e.model = c.algo == "elim_jdp" ? PrivacyModel::kJDP : PrivacyModel::kLDP;
    e.estimator = c.estimator;
    e.noise_free = c.estimator.noise_free;
    return run_elimination_bandit(env, budget, t, e, rng);
  }
  SquareCbConfig s;
  s.oracle = c.algo == "squarecb_jdp" ? SquareCbOracle::kDpSgd
                                      : SquareCbOracle::kLdpClippedSgd;
  s.noise_free = c.estimator.noise_free;
  return square_cb(env, budget, t, s, rng);
}

std::optional<SymMatrix> analytic_covariance(const DistributionSpec& s) {
  if (s.type == "sphere" || s.type == "rademacher") {
    return SymMatrix::Identity(s.dim) * (s.bound * s.bound / s.dim);
  }
  return std::nullopt;
}

}  // namespace

void parallel_for(int n, int threads, const std::function<void(int)>& f) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::mutex mu;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&]() {
      for (int i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

SweepResult run_sweep(const ExperimentConfig& c) {
  if (c.t_grid.empty()) throw ConfigError("T: grid is empty");
  const bool bandit = is_bandit_algo(c.algo);
  std::optional<CovariateDistribution> dist;
  std::optional<LabelMechanism> labels;
  std::optional<MomentOracle> oracle;
  std::optional<SymMatrix> cov;
  std::optional<BanditEnv> env;
  if (bandit) {
    env = build_env(c.bandit);
  } else {
    dist = build_distribution(c.distribution);
    labels = build_labels(c.labels, dist->bound());
    labels->validate(*dist);
    bool want_oracle = c.algo == "iw_ldp_fixed" || c.algo == "iw_dp_fixed";
    for (const auto& m : c.metrics) {
      if (m == "l1_err" || m == "pop_ratio") want_oracle = true;
      if (m == "sigma_err") {
        cov = analytic_covariance(c.distribution);
        if (!cov) want_oracle = true;
      }
    }
    if (want_oracle) {
      if (dist->finite()) {
        oracle = moment_oracle(*dist);
      } else {
        RngStream orng = RngStream(c.seed).split(0xFFFFFFFFull);
        const int samples =
            std::max(10000, std::min(100000, 20000000 / dist->dim()));
        oracle = estimate_moments_mc(*dist, samples, orng);
      }
      if (!cov) cov = oracle->covariance();
    }
  }

  const int n_tasks = static_cast<int>(c.t_grid.size()) * c.replications;
  std::vector<std::vector<ResultRow>> rows(n_tasks);
  std::vector<PrivacyTotals> ledgers(n_tasks), declared(n_tasks);
  std::vector<int> failed(n_tasks, 0);
  parallel_for(n_tasks, c.threads, [&](int task) {
    const int ti = task / c.replications;
    const int rep = task % c.replications;
    const int t = c.t_grid[ti];
    const std::uint64_t seed = mix64(c.seed + 0x9e3779b97f4a7c15ull *
                                                  std::uint64_t(task + 1));
    RngStream rng(seed);
    std::ostringstream id;
    id << c.algo << "-T" << t << "-r" << rep;
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::pair<std::string, double>> vals;
    try {
      if (bandit) {
        RegretTrace tr = run_bandit_algo(c, *env, t, rng);
        for (const auto& m : c.metrics) {
          if (m == "regret") vals.emplace_back(m, tr.cum_at(t));
        }
        ledgers[task] = tr.ledger.per_record();
        declared[task] = tr.declared;
      } else {
        RngStream data_rng = rng.split(1);
        RngStream est_rng = rng.split(2);
        Dataset data = sample_dataset(*dist, *labels, t, data_rng);
        EstimateReport r =
            run_estimator(c, data, oracle ? &*oracle : nullptr, est_rng);
        const Vector err = r.theta_hat - labels->theta_star;
        for (const auto& m : c.metrics) {
          if (m == "l2_err") {
            vals.emplace_back(m, err.norm());
          } else if (m == "sigma_err") {
            vals.emplace_back(m, err.dot(*cov * err));
          } else if (m == "l1_err") {
            vals.emplace_back(m, oracle->mean_abs_projection(err));
          } else if (m == "uinv_err" || m == "winv_err") {
            if (r.weight) {
              vals.emplace_back(
                  m, r.weight->matrix.mat().ldlt().solve(err).norm());
            }
          } else if (m == "residual") {
            if (r.weight) vals.emplace_back(m, r.weight->residual);
          } else if (m == "pop_ratio") {
            vals.emplace_back(m, price_of_privacy(*oracle, t,
                                                  PrivacyBudget(c.alpha, c.beta)));
          }
        }
        ledgers[task] = r.ledger.per_record();
        declared[task] = r.declared;
      }
    } catch (const NumericalError& e) {
      failed[task] = 1;
      vals.emplace_back("error", 3.0);
    } catch (const ConfigError& e) {
      failed[task] = 1;
      vals.emplace_back("error", 2.0);
    }
    const double ms =
        c.timing ? std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count()
                 : 0.0;
    for (const auto& [m, v] : vals) {
      rows[task].push_back({id.str(), seed, t, c.algo, m, v, ms});
    }
  });

  SweepResult out;
  for (int task = 0; task < n_tasks; ++task) {
    for (auto& r : rows[task]) out.rows.push_back(std::move(r));
    out.failures += failed[task];
    out.ledger_max.alpha = std::max(out.ledger_max.alpha, ledgers[task].alpha);
    out.ledger_max.beta = std::max(out.ledger_max.beta, ledgers[task].beta);
    out.declared_max.alpha =
        std::max(out.declared_max.alpha, declared[task].alpha);
    out.declared_max.beta =
        std::max(out.declared_max.beta, declared[task].beta);
    if (std::abs(ledgers[task].alpha - declared[task].alpha) > 1e-12 ||
        std::abs(ledgers[task].beta - declared[task].beta) > 1e-12) {
      out.ledger_matches_declared = false;
    }
  }
  if (c.t_grid.size() >= 3) {
    for (const auto& m : c.metrics) {
      std::vector<std::pair<double, double>> pts;
      for (const auto& r : out.rows) {
        if (r.metric == m) pts.emplace_back(r.t, r.value);
      }
      std::vector<double> ts;
      for (const auto& p : pts) ts.push_back(p.first);
      std::sort(ts.begin(), ts.end());
      if (std::unique(ts.begin(), ts.end()) - ts.begin() < 3) continue;
      const SlopeFit f = fit_loglog_slope(pts);
      out.rows.push_back(
          {c.algo + "-fit-" + m, c.seed, 0, c.algo, "slope", f.slope, 0.0});
    }
  }
  return out;
}

void write_sweep(const ExperimentConfig& c, const SweepResult& result) {
  if (c.out.empty()) throw ConfigError("out: output path required");
  const std::string tmp = c.out + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw ConfigError("out: cannot write " + tmp);
    write_csv_header(os);
    for (const auto& r : result.rows) write_csv_row(os, r);
  }
  if (std::rename(tmp.c_str(), c.out.c_str()) != 0) {
    throw ConfigError("out: cannot rename to " + c.out);
  }
  Json side = {{"config", config_to_json(c)},
               {"ledger_per_record_max", to_json(result.ledger_max)},
               {"declared_max", to_json(result.declared_max)},
               {"ledger_matches_declared", result.ledger_matches_declared},
               {"failures", result.failures}};
  std::ofstream js(c.out + ".config.json", std::ios::binary | std::ios::trunc);
  js << side.dump(2) << '\n';
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw ArgumentError("quantile: empty input");
  std::sort(v.begin(), v.end());
  const double pos = q * (v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - lo) * (v[hi] - v[lo]);
}

SlopeFit fit_loglog_slope(const std::vector<std::pair<double, double>>& pts) {
  std::map<double, std::vector<double>> by_t;
  SlopeFit fit;
  for (const auto& [t, v] : pts) {
    if (!(t > 0.0) || !(v > 0.0)) {
      ++fit.excluded;
      continue;
    }
    by_t[t].push_back(v);
  }
  if (by_t.size() < 3) {
    throw ArgumentError("fit_loglog_slope: need >= 3 distinct T values");
  }
  std::vector<double> xs, ys;
  for (auto& [t, vs] : by_t) {
    xs.push_back(std::log(t));
    ys.push_back(std::log(median(vs)));
  }
  const double n = xs.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / n;
    my += ys[i] / n;
  }
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

MomentOracle estimate_moments_mc(const CovariateDistribution& dist,
                                 int samples, RngStream& rng) {
  if (samples < 10000) {
    throw ArgumentError("estimate_moments_mc: need at least 1e4 samples");
  }
  return frozen_empirical(dist, samples, rng);
}

}  // namespace infoweight
