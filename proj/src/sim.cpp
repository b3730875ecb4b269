#include "asgd/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace asgd {

int dylu_steps(double v_w, double v_max, int h) {
  if (!(v_w > 0.0) || !(v_max > 0.0))
    throw std::invalid_argument("dylu_steps: speeds must be > 0");
  if (h < 1) throw std::invalid_argument("dylu_steps: h must be >= 1");
  const int steps = static_cast<int>(std::floor(v_w / v_max * h));
  return std::max(1, steps);
}

WorkerHandle* get_completed_worker(std::vector<WorkerHandle>& workers,
                                   double tau_grace, double tau_sync) {
  WorkerHandle* best = nullptr;
  for (WorkerHandle& w : workers) {
    if (w.status != WorkerStatus::kTraining) continue;
    if (best == nullptr || w.job.completed_time < best->job.completed_time ||
        (w.job.completed_time == best->job.completed_time && w.id < best->id))
      best = &w;
  }
  if (best == nullptr) return nullptr;
  if (best->job.completed_time - tau_sync <= tau_grace) return best;
  return nullptr;
}

SyncStrategy::SyncStrategy(const ExperimentConfig& config)
    : kind_(config.strategy),
      opt_kind_(config.outer_opt),
      eps_lr_(config.outer_lr),
      poly_exponent_(config.poly_exponent),
      staleness_threshold_(config.staleness_threshold),
      lambda_(config.delay_lambda) {
  outer_momentum_.beta = config.outer_beta;
  outer_nesterov_.beta = config.outer_beta;
  dn_.beta = config.outer_beta;
  dn_.n = config.outer_n;
  dn_.c = config.outer_c;
  buffer_.capacity = config.outer_n;
}

void SyncStrategy::outer_step(std::vector<double>& params,
                              const std::vector<double>& g) {
  switch (opt_kind_) {
    case OuterOptKind::kSgd: outer_sgd_.step(params, g, eps_lr_); break;
    case OuterOptKind::kMomentum: outer_momentum_.step(params, g, eps_lr_); break;
    case OuterOptKind::kNesterov: outer_nesterov_.step(params, g, eps_lr_); break;
    case OuterOptKind::kAdam: outer_adam_.step(params, g, eps_lr_); break;
  }
}

bool SyncStrategy::apply(std::vector<double>& params, PseudoGradient g,
                         const std::vector<double>& base_params) {
  switch (kind_) {
    case StrategyKind::kVanilla:
      outer_step(params, g.delta);
      return true;
    case StrategyKind::kPoly:
      outer_step(params, poly_discount(std::move(g), poly_exponent_).delta);
      return true;
    case StrategyKind::kPolyThres: {
      auto kept = staleness_filter(std::move(g), staleness_threshold_);
      if (!kept) return false;
      outer_step(params, poly_discount(std::move(*kept), poly_exponent_).delta);
      return true;
    }
    case StrategyKind::kDelayComp:
      outer_step(params,
                 delay_compensate(std::move(g), params, base_params, lambda_).delta);
      return true;
    case StrategyKind::kAsyncBuffer: {
      auto mean = buffer_.push(std::move(g.delta));
      if (mean) outer_step(params, *mean);
      return true;
    }
    case StrategyKind::kDelayedNesterov:
      dn_.step(params, g.delta, eps_lr_);
      return true;
  }
  return true;
}

Simulation::Simulation(const ExperimentConfig& config)
    : cfg_(config),
      model_(config.mlp_config()),
      lr_spec_(config.lr_spec()),
      sched_rng_(derive_seed(config.seed_run, 1)) {
  cfg_.validate();

  const Dataset dataset = generate_dataset(cfg_.mixture_spec());
  shards_ = split_shards(dataset, cfg_.workers, cfg_.data_shard_mode,
                         derive_seed(cfg_.seed_data, 101));

  MixtureSpec eval_spec = cfg_.mixture_spec();
  eval_spec.num_points = cfg_.data_eval_points;
  eval_spec.seed = derive_seed(cfg_.seed_data, 202);
  eval_set_ = generate_dataset(eval_spec).batch;

  server_params_ = model_.init_params(cfg_.seed_init);

  shard_rngs_.reserve(shards_.size());
  shard_adamw_.resize(shards_.size());
  for (size_t s = 0; s < shards_.size(); ++s) {
    shard_rngs_.emplace_back(derive_seed(cfg_.seed_run, 1000 + s));
    shard_adamw_[s].beta1 = cfg_.inner_beta1;
    shard_adamw_[s].beta2 = cfg_.inner_beta2;
    shard_adamw_[s].eps = cfg_.inner_eps;
    shard_adamw_[s].weight_decay = cfg_.inner_weight_decay;
  }

  speeds_ = cfg_.resolved_speeds();
  v_max_ = *std::max_element(speeds_.begin(), speeds_.end());
  grace_ = cfg_.resolved_grace(speeds_);
}

PseudoGradient Simulation::train_shard_job(int shard_id, int steps) {
  Shard& shard = shards_[shard_id];
  Rng& rng = shard_rngs_[shard_id];

  ParamVector theta = server_params_;
  for (int s = 0; s < steps; ++s) {
    const Batch batch = next_batch(shard, cfg_.batch_size, rng);
    const double lr = lr_at(lr_spec_, shard.steps_taken);
    BackwardResult back = model_.backward(theta, batch);
    if (cfg_.inner_opt == InnerOptKind::kAdamW)
      shard_adamw_[shard_id].step(theta.values, back.grad.values, lr);
    else
      sgd_step(theta.values, back.grad.values, lr);
    ++shard.steps_taken;
  }

  PseudoGradient g;
  g.delta.resize(server_params_.values.size());
  for (size_t i = 0; i < g.delta.size(); ++i)
    g.delta[i] = server_params_.values[i] - theta.values[i];
  return g;
}

void Simulation::assign_job(WorkerHandle& worker, double start_time) {
  const int shard_id = sample_shard(shards_, sched_rng_);
  const int steps =
      cfg_.dylu ? dylu_steps(worker.speed, v_max_, cfg_.h_steps) : cfg_.h_steps;

  worker.job.shard_id = shard_id;
  worker.job.steps = steps;
  worker.job.base_version = clock_.server_version;
  worker.job.start_time = start_time;
  worker.job.completed_time = start_time + steps / worker.speed;
  worker.base_params = server_params_.values;
  worker.update = train_shard_job(shard_id, steps);
  worker.update.worker_id = worker.id;
  worker.update.base_version = worker.job.base_version;
  worker.status = WorkerStatus::kTraining;
}

EvalMetrics Simulation::evaluate() { return model_.eval_metrics(server_params_, eval_set_); }

MetricsRow Simulation::make_row(bool fresh_eval) {
  if (fresh_eval) last_eval_ = evaluate();
  MetricsRow row;
  row.server_update = clock_.server_version;
  row.local_updates = clock_.total_local_updates;
  row.sim_time_s = clock_.now;
  row.eval_loss = last_eval_.loss;
  row.eval_ppl = last_eval_.ppl;
  row.eval_acc = last_eval_.accuracy;
  row.strategy = cfg_.strategy_tag();
  return row;
}

MetricsLog Simulation::run() {
  return cfg_.mode == RunMode::kSync ? run_sync() : run_async();
}

MetricsLog Simulation::run_async() {
  SyncStrategy strategy(cfg_);
  std::vector<WorkerHandle> workers(cfg_.workers);
  for (int i = 0; i < cfg_.workers; ++i) {
    workers[i].id = i;
    workers[i].speed = speeds_[i];
  }

  MetricsLog log;
  log.rows.push_back(make_row(true));

  for (WorkerHandle& w : workers) assign_job(w, 0.0);
  double tau_sync = std::numeric_limits<double>::infinity();

  while (clock_.total_local_updates < cfg_.t_max) {
    WorkerHandle* w = get_completed_worker(workers, grace_, tau_sync);
    if (w != nullptr) {
      tau_sync = std::min(tau_sync, w->job.completed_time);
      clock_.now = std::max(clock_.now, w->job.completed_time);

      PseudoGradient g = w->update;
      g.staleness = clock_.server_version - g.base_version;
      const bool applied = strategy.apply(server_params_.values, g, w->base_params);

      SyncEvent ev;
      ev.version_before = clock_.server_version;
      ev.worker_id = w->id;
      ev.shard_id = w->job.shard_id;
      ev.steps = w->job.steps;
      ev.base_version = g.base_version;
      ev.staleness = g.staleness;
      ev.time = clock_.now;
      ev.discarded = !applied;
      trace_.push_back(ev);

      ++clock_.server_version;  // discarded updates still count (work happened)
      clock_.total_local_updates += w->job.steps;
      w->status = WorkerStatus::kDone;
      if (on_server_update) on_server_update(clock_.server_version, server_params_.values);

      const bool terminal = clock_.total_local_updates >= cfg_.t_max;
      const bool fresh = terminal || clock_.server_version % cfg_.eval_every == 0;
      log.rows.push_back(make_row(fresh));
    } else {
      // grace window closed with no further completions inside it; the
      // processed cohort restarts together from the current server model
      const double restart = tau_sync + grace_;
      clock_.now = std::max(clock_.now, restart);
      tau_sync = std::numeric_limits<double>::infinity();
      for (WorkerHandle& worker : workers)
        if (worker.status == WorkerStatus::kDone) assign_job(worker, clock_.now);
    }
  }
  return log;
}

MetricsLog Simulation::run_sync() {
  SyncStrategy strategy(cfg_);
  const int k = cfg_.workers;
  const long steps_per_round = static_cast<long>(k) * cfg_.h_steps;
  const long rounds = (cfg_.t_max + steps_per_round - 1) / steps_per_round;
  const double v_min = *std::min_element(speeds_.begin(), speeds_.end());
  const double round_seconds = cfg_.h_steps / v_min;  // stragglers gate the round

  MetricsLog log;
  log.rows.push_back(make_row(true));

  std::vector<double> mean_delta(server_params_.values.size());
  for (long round = 0; round < rounds; ++round) {
    std::fill(mean_delta.begin(), mean_delta.end(), 0.0);
    for (int i = 0; i < k; ++i) {
      const PseudoGradient g = train_shard_job(i, cfg_.h_steps);
      for (size_t j = 0; j < mean_delta.size(); ++j) mean_delta[j] += g.delta[j];
    }
    for (double& d : mean_delta) d /= k;
    strategy.outer_step(server_params_.values, mean_delta);

    ++clock_.server_version;
    clock_.total_local_updates += steps_per_round;
    clock_.now += round_seconds;
    if (on_server_update) on_server_update(clock_.server_version, server_params_.values);

    const bool terminal = round + 1 == rounds;
    const bool fresh = terminal || clock_.server_version % cfg_.eval_every == 0;
    log.rows.push_back(make_row(fresh));
  }
  return log;
}

}  // namespace asgd
