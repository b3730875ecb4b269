#pragma once

#include <functional>
#include <vector>

#include "asgd/config.hpp"
#include "asgd/core.hpp"
#include "asgd/datagen.hpp"
#include "asgd/metrics.hpp"
#include "asgd/model.hpp"
#include "asgd/optim.hpp"
#include "asgd/rng.hpp"

namespace asgd {

// Local steps for a worker of speed v_w when the fastest worker runs h:
// floor(v_w / v_max * h), clamped to at least 1 so slow workers still
// participate.
int dylu_steps(double v_w, double v_max, int h);

enum class WorkerStatus { kIdle, kTraining, kDone };

struct Job {
  int shard_id = -1;
  int steps = 0;
  long base_version = 0;
  double start_time = 0.0;
  double completed_time = 0.0;
};

struct WorkerHandle {
  int id = 0;
  double speed = 1.0;
  WorkerStatus status = WorkerStatus::kIdle;
  Job job;
  PseudoGradient update;             // ready when the job completes
  std::vector<double> base_params;   // server model the job started from
};

struct SimClock {
  double now = 0.0;
  long server_version = 0;
  long total_local_updates = 0;
};

// Earliest-completing unprocessed worker, provided its completion time falls
// inside the grace window: completed_time - tau_sync <= tau_grace. tau_sync
// of +infinity accepts any completion (it opens a new window). Ties in
// completion time break by ascending worker id. Returns nullptr when no
// worker qualifies.
WorkerHandle* get_completed_worker(std::vector<WorkerHandle>& workers,
                                   double tau_grace, double tau_sync);

// One server-side sync event, kept for inspection by tests and tools.
struct SyncEvent {
  long version_before = 0;
  int worker_id = -1;
  int shard_id = -1;
  int steps = 0;
  long base_version = 0;
  long staleness = 0;
  double time = 0.0;
  bool discarded = false;  // staleness filter dropped the update
};

// Pseudo-gradient transform chain plus the outer optimizer, with all state
// owned here. apply() services one received pseudo-gradient.
class SyncStrategy {
 public:
  explicit SyncStrategy(const ExperimentConfig& config);

  // Returns false when the update was discarded by the staleness filter.
  bool apply(std::vector<double>& params, PseudoGradient g,
             const std::vector<double>& base_params);

  // Direct outer-optimizer step on an already-aggregated gradient (sync mode).
  void outer_step(std::vector<double>& params, const std::vector<double>& g);

 private:
  StrategyKind kind_;
  OuterOptKind opt_kind_;
  double eps_lr_;
  double poly_exponent_;
  int staleness_threshold_;
  double lambda_;
  OuterSgd outer_sgd_;
  OuterMomentum outer_momentum_;
  OuterNesterov outer_nesterov_;
  OuterAdam outer_adam_;
  DelayedNesterov dn_;
  GradientBuffer buffer_;
};

// Deterministic single-threaded event loop over simulated time. One instance
// owns one experiment; independent instances share nothing and may run in
// parallel.
class Simulation {
 public:
  explicit Simulation(const ExperimentConfig& config);

  MetricsLog run();  // dispatches on config mode
  MetricsLog run_async();
  MetricsLog run_sync();

  const SimClock& clock() const { return clock_; }
  const std::vector<Shard>& shards() const { return shards_; }
  const std::vector<SyncEvent>& trace() const { return trace_; }
  const std::vector<double>& server_params() const { return server_params_.values; }

  // Invoked after every server update with (version, parameters).
  std::function<void(long, const std::vector<double>&)> on_server_update;

 private:
  void assign_job(WorkerHandle& worker, double start_time);
  PseudoGradient train_shard_job(int shard_id, int steps);
  EvalMetrics evaluate();
  MetricsRow make_row(bool fresh_eval);

  ExperimentConfig cfg_;
  Mlp model_;
  ParamVector server_params_;
  std::vector<Shard> shards_;
  std::vector<Rng> shard_rngs_;
  std::vector<AdamWState> shard_adamw_;
  LrScheduleSpec lr_spec_;
  std::vector<double> speeds_;
  double v_max_ = 1.0;
  double grace_ = 0.0;
  Batch eval_set_;
  Rng sched_rng_;
  SimClock clock_;
  std::vector<SyncEvent> trace_;
  EvalMetrics last_eval_;
};

}  // namespace asgd
