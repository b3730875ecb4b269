#include "asgd/validate.hpp"

#include <algorithm>
#include <cmath>

#include "asgd/config.hpp"
#include "asgd/model.hpp"
#include "asgd/optim.hpp"
#include "asgd/rng.hpp"
#include "asgd/sim.hpp"

namespace asgd {

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  const size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

ExperimentConfig small_equivalence_config() {
  ExperimentConfig cfg;
  cfg.data_points = 2048;
  cfg.data_eval_points = 256;
  cfg.workers = 4;
  cfg.profile = SpeedProfile::kNo;
  cfg.h_steps = 10;
  cfg.dylu = true;
  cfg.batch_size = 16;
  cfg.eval_every = 1000000;  // metrics are irrelevant here
  cfg.outer_lr = 0.3;
  // equal-size shards so progress-balanced sampling assigns every shard
  // exactly once per cohort, mirroring the synchronous round
  cfg.data_shard_mode = ShardMode::kIid;
  return cfg;
}

}  // namespace

CheckReport check_sync_via_async(int rounds, double beta_sync, double beta_async) {
  ExperimentConfig cfg = small_equivalence_config();
  const long budget = static_cast<long>(rounds) * cfg.workers * cfg.h_steps;
  cfg.t_max = budget;

  ExperimentConfig sync_cfg = cfg;
  sync_cfg.mode = RunMode::kSync;
  sync_cfg.strategy = StrategyKind::kVanilla;
  sync_cfg.outer_opt = OuterOptKind::kNesterov;
  sync_cfg.outer_beta = beta_sync;

  ExperimentConfig async_cfg = cfg;
  async_cfg.mode = RunMode::kAsync;
  async_cfg.strategy = StrategyKind::kDelayedNesterov;
  async_cfg.outer_n = cfg.workers;
  async_cfg.outer_c = 0.0;
  async_cfg.outer_beta = beta_async;

  std::vector<std::vector<double>> sync_traj, async_traj;
  Simulation sync_sim(sync_cfg);
  sync_sim.on_server_update = [&](long, const std::vector<double>& p) {
    sync_traj.push_back(p);
  };
  sync_sim.run_sync();

  Simulation async_sim(async_cfg);
  async_sim.on_server_update = [&](long version, const std::vector<double>& p) {
    if (version % async_cfg.workers == 0) async_traj.push_back(p);  // round boundary
  };
  async_sim.run_async();

  CheckReport report;
  report.name = "sync-via-async";
  report.tolerance = 1e-9;
  const size_t common = std::min(sync_traj.size(), async_traj.size());
  for (size_t i = 0; i < common; ++i)
    report.max_deviation =
        std::max(report.max_deviation, max_abs_diff(sync_traj[i], async_traj[i]));
  report.pass = common >= static_cast<size_t>(rounds) &&
                report.max_deviation <= report.tolerance;
  return report;
}

CheckReport check_dn_equals_nesterov(int steps) {
  CheckReport report;
  report.name = "dn(1)-equals-nesterov";
  report.tolerance = 1e-12;

  const int dim = 16;
  Rng rng(7);
  for (double c : {0.0, 0.1, 1.0}) {
    std::vector<double> p_dn(dim, 0.5), p_nesterov(dim, 0.5);
    DelayedNesterov dn;
    dn.n = 1;
    dn.c = c;
    dn.beta = 0.9;
    OuterNesterov nesterov;
    nesterov.beta = 0.9;
    for (int t = 0; t < steps; ++t) {
      std::vector<double> g(dim);
      for (double& x : g) x = rng.uniform(-1.0, 1.0);
      dn.step(p_dn, g, 0.1);
      nesterov.step(p_nesterov, g, 0.1);
      report.max_deviation = std::max(report.max_deviation, max_abs_diff(p_dn, p_nesterov));
    }
  }
  report.pass = report.max_deviation <= report.tolerance;
  return report;
}

CheckReport check_sequential_nesterov() {
  CheckReport report;
  report.name = "sequential-nesterov-closed-form";
  report.tolerance = 1e-12;

  const int dim = 8;
  Rng rng(11);
  for (double beta : {0.1, 0.5, 0.9}) {
    std::vector<double> g(dim), m0(dim);
    for (double& x : g) x = rng.uniform(-1.0, 1.0);
    for (double& x : m0) x = rng.uniform(-1.0, 1.0);

    const double eps_lr = 0.37;
    std::vector<double> params(dim, 0.0);
    OuterNesterov nesterov;
    nesterov.beta = beta;
    nesterov.m = m0;
    for (int i = 0; i < 4; ++i) nesterov.step(params, g, eps_lr);

    const auto closed = sequential_nesterov_closed_form(m0, g, beta, 4);
    std::vector<double> predicted(dim);
    for (int i = 0; i < dim; ++i) predicted[i] = -eps_lr * closed.total_step_over_eps[i];

    report.max_deviation = std::max(report.max_deviation, max_abs_diff(params, predicted));
    report.max_deviation =
        std::max(report.max_deviation, max_abs_diff(nesterov.m, closed.m_final));
  }
  report.pass = report.max_deviation <= report.tolerance;
  return report;
}

CheckReport check_gradient_oracle(int draws) {
  CheckReport report;
  report.name = "gradient-oracle";
  report.tolerance = 1e-5;

  Rng rng(3);
  for (int d = 0; d < draws; ++d) {
    MlpConfig cfg;
    cfg.input_dim = 2;
    cfg.hidden_dims = {d % 3 == 0 ? 8 : 32};
    cfg.num_classes = 4;
    cfg.activation = d % 2 == 0 ? Activation::kRelu : Activation::kTanh;
    Mlp model(cfg);

    ParamVector params = model.init_params(rng.next_u64());
    const double scale = d % 3 == 2 ? 3.0 : 1.0;
    for (double& v : params.values) v = scale * rng.uniform(-1.0, 1.0);

    Batch batch;
    batch.cols = cfg.input_dim;
    const int rows = 1 + static_cast<int>(rng.below(6));
    for (int r = 0; r < rows; ++r) {
      double x[2] = {rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
      batch.push_row(x, static_cast<int>(rng.below(cfg.num_classes)));
    }

    const ParamVector analytic = model.backward(params, batch).grad;
    const ParamVector numeric = model.finite_diff_grad(params, batch, 1e-6);
    for (long i = 0; i < analytic.size(); ++i) {
      const double denom =
          std::max({1.0, std::abs(analytic.values[i]), std::abs(numeric.values[i])});
      report.max_deviation = std::max(
          report.max_deviation, std::abs(analytic.values[i] - numeric.values[i]) / denom);
    }
  }
  report.pass = report.max_deviation <= report.tolerance;
  return report;
}

std::vector<CheckReport> run_all_checks() {
  return {check_sync_via_async(), check_dn_equals_nesterov(),
          check_sequential_nesterov(), check_gradient_oracle()};
}

}  // namespace asgd
