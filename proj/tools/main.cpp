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

// Command-line front end: solve-info, regress, bandit, sweep, separation and
// selftest.

#include <cmath>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "infoweight/errors.hpp"
#include "infoweight/harness.hpp"
#include "infoweight/info_matrix.hpp"
#include "infoweight/log.hpp"
#include "infoweight/serialize.hpp"

namespace iw = infoweight;

namespace {

struct CommonFlags {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  bool paper_constants = false;
  int threads = 0;
};

iw::ExperimentConfig resolve(const CommonFlags& f) {
  iw::ExperimentConfig c;
  if (!f.config.empty()) c = iw::load_config(f.config);
  if (f.seed_set) c.seed = f.seed;
  if (!f.out.empty()) c.out = f.out;
  if (f.paper_constants) c.estimator.paper_constants = true;
  if (f.threads > 0) c.threads = f.threads;
  return c;
}

void emit_json(const iw::Json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream os(out, std::ios::binary | std::ios::trunc);
  if (!os) throw iw::ConfigError("out: cannot write " + out);
  os << j.dump(2) << '\n';
}

int last_t(const iw::ExperimentConfig& c) {
  if (c.t_grid.empty()) throw iw::ConfigError("T: grid is empty");
  return c.t_grid.back();
}

int cmd_solve_info(const iw::ExperimentConfig& c) {
  const iw::CovariateDistribution dist = iw::build_distribution(c.distribution);
  iw::RngStream rng = iw::RngStream(c.seed).split(0);
  const iw::MomentOracle oracle =
      dist.finite() ? iw::moment_oracle(dist)
                    : iw::estimate_moments_mc(dist, 100000, rng);
  const iw::Model model = c.model == "dp" ? iw::Model::kDP : iw::Model::kLDP;
  const iw::SolveResult r =
      iw::solve_exact(model, oracle, c.lambda, c.gamma);
  emit_json({{"config", iw::config_to_json(c)},
             {"weight", iw::to_json(r.weight)},
             {"trace", iw::to_json(r.trace)}},
            c.out);
  return 0;
}

int cmd_regress(const iw::ExperimentConfig& c) {
  const iw::CovariateDistribution dist = iw::build_distribution(c.distribution);
  const iw::LabelMechanism labels = iw::build_labels(c.labels, dist.bound());
  labels.validate(dist);
  iw::RngStream root(c.seed);
  iw::RngStream data_rng = root.split(1);
  iw::RngStream est_rng = root.split(2);
  const iw::Dataset data = iw::sample_dataset(dist, labels, last_t(c), data_rng);
  std::optional<iw::MomentOracle> oracle;
  if (c.algo == "iw_ldp_fixed" || c.algo == "iw_dp_fixed") {
    iw::RngStream orng = root.split(3);
    oracle = dist.finite() ? iw::moment_oracle(dist)
                           : iw::estimate_moments_mc(dist, 100000, orng);
  }
  const iw::EstimateReport r =
      iw::run_estimator(c, data, oracle ? &*oracle : nullptr, est_rng);
  iw::Json j = iw::to_json(r);
  j["config"] = iw::config_to_json(c);
  j["l2_err"] = (r.theta_hat - labels.theta_star).norm();
  emit_json(j, c.out);
  return 0;
}

int cmd_bandit(const iw::ExperimentConfig& c) {
  const iw::BanditEnv env = iw::build_env(c.bandit);
  const iw::PrivacyBudget budget(c.alpha, c.beta);
  iw::RngStream rng(c.seed);
  iw::RegretTrace tr;
  if (c.algo == "elim_jdp" || c.algo == "elim_ldp") {
    iw::EliminationConfig e = c.elimination;
    e.model = c.algo == "elim_jdp" ? iw::PrivacyModel::kJDP
                                   : iw::PrivacyModel::kLDP;
    e.estimator = c.estimator;
    e.noise_free = c.estimator.noise_free;
    tr = iw::run_elimination_bandit(env, budget, last_t(c), e, rng);
  } else if (c.algo == "squarecb_jdp" || c.algo == "squarecb_ldp") {
    iw::SquareCbConfig s;
    s.oracle = c.algo == "squarecb_jdp" ? iw::SquareCbOracle::kDpSgd
                                        : iw::SquareCbOracle::kLdpClippedSgd;
    s.noise_free = c.estimator.noise_free;
    tr = iw::square_cb(env, budget, last_t(c), s, rng);
  } else {
    throw iw::ConfigError("estimator.algo: '" + c.algo +
                          "' is not a bandit algorithm");
  }
  iw::Json summary = iw::to_json(tr);
  summary["config"] = iw::config_to_json(c);
  if (c.out.empty()) {
    std::cout << summary.dump(2) << '\n';
    return 0;
  }
  {
    std::ofstream os(c.out, std::ios::binary | std::ios::trunc);
    if (!os) throw iw::ConfigError("out: cannot write " + c.out);
    tr.write_csv(os);
  }
  emit_json(summary, c.out + ".config.json");
  return 0;
}

int cmd_sweep(const iw::ExperimentConfig& c) {
  const iw::SweepResult r = iw::run_sweep(c);
  if (c.out.empty()) {
    iw::write_csv_header(std::cout);
    for (const auto& row : r.rows) iw::write_csv_row(std::cout, row);
  } else {
    iw::write_sweep(c, r);
  }
  if (r.failures > 0) {
    std::cerr << r.failures << " run(s) failed; see the error metric\n";
  }
  return 0;
}

// Runs the configured sweep for iw_ldp and ssp_local with the l1_err metric.
int cmd_separation(iw::ExperimentConfig c) {
  c.metrics = {"l1_err"};
  iw::SweepResult all;
  for (const char* algo : {"iw_ldp", "ssp_local"}) {
    c.algo = algo;
    iw::SweepResult r = iw::run_sweep(c);
    all.rows.insert(all.rows.end(), r.rows.begin(), r.rows.end());
    all.failures += r.failures;
    all.ledger_max.alpha = std::max(all.ledger_max.alpha, r.ledger_max.alpha);
    all.ledger_max.beta = std::max(all.ledger_max.beta, r.ledger_max.beta);
    all.declared_max.alpha =
        std::max(all.declared_max.alpha, r.declared_max.alpha);
    all.declared_max.beta =
        std::max(all.declared_max.beta, r.declared_max.beta);
    all.ledger_matches_declared &= r.ledger_matches_declared;
  }
  c.algo = "separation";
  if (c.out.empty()) {
    iw::write_csv_header(std::cout);
    for (const auto& row : all.rows) iw::write_csv_row(std::cout, row);
  } else {
    iw::write_sweep(c, all);
  }
  return 0;
}

int cmd_selftest(std::uint64_t seed) {
  int failed = 0;
  auto report = [&](const std::string& name, bool ok) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << '\n';
    failed += ok ? 0 : 1;
  };
  iw::RngStream rng(seed);
  const iw::PrivacyBudget budget(1.0, 0.05);
  double ss = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double v = iw::gauss_priv(iw::Vector::Zero(1), 1.0, budget, rng)(0);
    ss += v * v;
  }
  report("gaussian channel std",
         std::abs(std::sqrt(ss / n) / budget.sigma() - 1.0) < 0.03);

  std::vector<iw::Atom> atoms;
  for (int j = 0; j < 3; ++j) {
    iw::Atom a;
    a.x = iw::Vector::Zero(3);
    a.x(j) = 1.0;
    a.prob = 0.2 + 0.1 * j;
    atoms.push_back(a);
  }
  atoms.push_back({iw::Vector::Constant(3, 1.0 / std::sqrt(3.0)), 0.1});
  const auto dist = iw::CovariateDistribution::finite_support(atoms, 1.0);
  const auto oracle = iw::moment_oracle(dist);
  const auto ldp = iw::solve_exact(iw::Model::kLDP, oracle, 0.05, 0.0);
  report("exact ldp solver", ldp.weight.residual <= 1e-8);
  const auto dp = iw::solve_exact(iw::Model::kDP, oracle, 0.05, 1.0);
  report("exact dp solver", dp.weight.residual <= 1e-8);
  return failed == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Information-weighted private regression and bandits"};
  app.require_subcommand(1);
  CommonFlags flags;
  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", flags.config, "TOML config file");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    sub->add_option_function<std::uint64_t>(
        "--seed",
        [&](const std::uint64_t& s) {
          flags.seed = s;
          flags.seed_set = true;
        },
        "Root seed (overrides the config)");
    sub->add_option("--out", flags.out, "Output path");
    sub->add_flag("--paper-constants", flags.paper_constants,
                  "Use the proof constants and per-mechanism budgets");
    sub->add_option("--threads", flags.threads, "Worker threads")
        ->check(CLI::PositiveNumber);
  };
  auto* solve = app.add_subcommand("solve-info", "Solve for U* or W*");
  auto* regress = app.add_subcommand("regress", "One private regression");
  auto* bandit = app.add_subcommand("bandit", "One bandit run");
  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo sweep to CSV");
  auto* sep = app.add_subcommand("separation", "IW-LDP versus local SSP");
  auto* self = app.add_subcommand("selftest", "Quick internal checks");
  for (auto* s : {solve, regress, bandit, sweep, sep}) add_common(s, true);
  add_common(self, false);
  bool quiet = false;
  app.add_flag("--quiet", quiet, "Silence warnings");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  iw::set_warnings_enabled(!quiet);
  try {
    if (*self) return cmd_selftest(flags.seed_set ? flags.seed : 1);
    const iw::ExperimentConfig c = resolve(flags);
    if (*solve) return cmd_solve_info(c);
    if (*regress) return cmd_regress(c);
    if (*bandit) return cmd_bandit(c);
    if (*sweep) return cmd_sweep(c);
    return cmd_separation(c);
  } catch (const iw::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const iw::ArgumentError& e) {
    std::cerr << "argument error: " << e.what() << '\n';
    return 2;
  } catch (const iw::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  }
}
