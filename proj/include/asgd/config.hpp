#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "asgd/core.hpp"
#include "asgd/datagen.hpp"
#include "asgd/optim.hpp"

namespace asgd {

enum class RunMode { kAsync, kSync };
enum class InnerOptKind { kSgd, kAdamW };
enum class OuterOptKind { kSgd, kMomentum, kNesterov, kAdam };
enum class StrategyKind {
  kVanilla,
  kPoly,
  kPolyThres,
  kDelayComp,
  kAsyncBuffer,
  kDelayedNesterov
};
enum class SpeedProfile { kNo, kSlight, kModerate, kVery, kExplicit };

// Full description of one experiment. Defaults give the toy task: 4 workers
// on the pinwheel mixture, AdamW inner, Nesterov outer, H = 50, 20k local
// updates. parse_config() overrides fields from flat key=value text.
struct ExperimentConfig {
  // data.*
  int data_classes = 4;
  int data_components_per_class = 4;
  int data_dim = 2;
  long data_points = 8192;
  double data_cov_scale = 0.05;
  ShardMode data_shard_mode = ShardMode::kByComponent;
  long data_eval_points = 2048;

  // model.*
  std::vector<int> model_hidden_dims = {32};
  Activation model_activation = Activation::kRelu;

  // sched.*
  int workers = 4;
  SpeedProfile profile = SpeedProfile::kVery;
  std::vector<double> explicit_speeds;
  RunMode mode = RunMode::kAsync;
  int h_steps = 50;
  bool dylu = false;
  double grace_period = -1.0;  // negative: auto, 0.5 / min(speeds)
  long t_max = 20000;
  long eval_every = 10;

  // inner.*
  InnerOptKind inner_opt = InnerOptKind::kAdamW;
  double inner_beta1 = 0.9;
  double inner_beta2 = 0.999;
  double inner_eps = 1e-8;
  double inner_weight_decay = 0.1;
  int batch_size = 32;

  // lr.*
  double lr_max = 0.01;
  double lr_min = 1e-4;
  long lr_warmup = 100;
  long lr_total = 0;  // 0: auto, t_max / workers

  // outer.*
  StrategyKind strategy = StrategyKind::kVanilla;
  OuterOptKind outer_opt = OuterOptKind::kNesterov;
  double outer_lr = 0.2;
  double outer_beta = 0.9;
  int outer_n = 4;
  double outer_c = 0.0;
  double poly_exponent = 0.5;
  int staleness_threshold = 10;  // kNoStalenessThreshold: never discard
  double delay_lambda = 0.5;

  // seed.*
  std::uint64_t seed_data = 1;
  std::uint64_t seed_init = 2;
  std::uint64_t seed_run = 3;

  void validate() const;

  std::vector<double> resolved_speeds() const;
  double resolved_grace(const std::vector<double>& speeds) const;
  long resolved_lr_total() const;
  MixtureSpec mixture_spec() const;
  MlpConfig mlp_config() const;
  LrScheduleSpec lr_spec() const;
  std::string strategy_tag() const;
};

// Parses the flat key=value format (one pair per line, '#' comment lines).
// Unknown keys, malformed values and constraint violations throw
// std::invalid_argument naming the offending key.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

}  // namespace asgd
