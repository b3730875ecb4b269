#include "asgd/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace asgd {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void bad_key(const std::string& key, const std::string& message) {
  throw std::invalid_argument("config key '" + key + "': " + message);
}

long parse_long(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const long out = std::stol(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return out;
  } catch (const std::exception&) {
    bad_key(key, "expected integer, got '" + value + "'");
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const double out = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return out;
  } catch (const std::exception&) {
    bad_key(key, "expected real number, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_key(key, "expected boolean, got '" + value + "'");
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> parts;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

}  // namespace

void ExperimentConfig::validate() const {
  mixture_spec().validate();
  mlp_config().validate();
  if (data_eval_points < 1)
    throw std::invalid_argument("config key 'data.eval_points': must be >= 1");
  if (workers < 1) throw std::invalid_argument("config key 'sched.workers': must be >= 1");
  if (profile == SpeedProfile::kExplicit) {
    if (static_cast<int>(explicit_speeds.size()) != workers)
      throw std::invalid_argument(
          "config key 'sched.speeds': must list one speed per worker");
    for (double v : explicit_speeds)
      if (!(v > 0.0))
        throw std::invalid_argument("config key 'sched.speeds': speeds must be > 0");
  }
  if (h_steps < 1) throw std::invalid_argument("config key 'sched.h_steps': must be >= 1");
  if (t_max < 0) throw std::invalid_argument("config key 'sched.t_max': must be >= 0");
  if (eval_every < 1)
    throw std::invalid_argument("config key 'sched.eval_every': must be >= 1");
  if (batch_size < 1)
    throw std::invalid_argument("config key 'inner.batch_size': must be >= 1");
  if (inner_weight_decay < 0.0)
    throw std::invalid_argument("config key 'inner.weight_decay': must be >= 0");
  try {
    lr_spec().validate();
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("config keys 'lr.*': ") + e.what());
  }
  if (outer_lr <= 0.0) throw std::invalid_argument("config key 'outer.lr': must be > 0");
  if (outer_beta <= 0.0 || outer_beta >= 1.0)
    throw std::invalid_argument("config key 'outer.beta': must lie in (0, 1)");
  if (outer_n < 1) throw std::invalid_argument("config key 'outer.n': must be >= 1");
  if (strategy == StrategyKind::kDelayedNesterov &&
      (outer_c < 0.0 || outer_c > 1.0 / outer_n)) {
    std::ostringstream msg;
    msg << "config key 'outer.c': must lie in [0, 1/N] = [0, " << 1.0 / outer_n
        << "] for delayed_nesterov";
    throw std::invalid_argument(msg.str());
  }
  if (poly_exponent < 0.0)
    throw std::invalid_argument("config key 'outer.poly_exponent': must be >= 0");
  if (staleness_threshold < 0 && staleness_threshold != kNoStalenessThreshold)
    throw std::invalid_argument(
        "config key 'outer.staleness_threshold': must be >= 0 or 'inf'");
  if (delay_lambda < 0.0)
    throw std::invalid_argument("config key 'outer.lambda': must be >= 0");
  if (mode == RunMode::kSync && strategy != StrategyKind::kVanilla)
    throw std::invalid_argument(
        "config key 'outer.strategy': sync mode supports only 'vanilla'");
}

std::vector<double> ExperimentConfig::resolved_speeds() const {
  if (profile == SpeedProfile::kExplicit) return explicit_speeds;
  std::vector<double> speeds(workers, 1.0);
  if (workers == 1) return speeds;
  const double span = workers - 1.0;
  for (int i = 0; i < workers; ++i) {
    switch (profile) {
      case SpeedProfile::kNo: speeds[i] = 1.0; break;
      case SpeedProfile::kSlight: speeds[i] = 1.0 - 0.3 * i / span; break;
      case SpeedProfile::kModerate: speeds[i] = 1.0 - 0.75 * i / span; break;
      case SpeedProfile::kVery: speeds[i] = std::pow(2.0, -3.0 * i / span); break;
      case SpeedProfile::kExplicit: break;
    }
  }
  return speeds;
}

double ExperimentConfig::resolved_grace(const std::vector<double>& speeds) const {
  if (grace_period >= 0.0) return grace_period;
  double vmin = speeds.front();
  for (double v : speeds) vmin = std::min(vmin, v);
  return 0.5 / vmin;
}

long ExperimentConfig::resolved_lr_total() const {
  if (lr_total > 0) return lr_total;
  return std::max(1L, t_max / workers);
}

MixtureSpec ExperimentConfig::mixture_spec() const {
  MixtureSpec spec;
  spec.num_classes = data_classes;
  spec.components_per_class = data_components_per_class;
  spec.dim = data_dim;
  spec.num_points = data_points;
  spec.covariance_scale = data_cov_scale;
  spec.seed = seed_data;
  return spec;
}

MlpConfig ExperimentConfig::mlp_config() const {
  MlpConfig cfg;
  cfg.input_dim = data_dim;
  cfg.hidden_dims = model_hidden_dims;
  cfg.num_classes = data_classes;
  cfg.activation = model_activation;
  return cfg;
}

LrScheduleSpec ExperimentConfig::lr_spec() const {
  LrScheduleSpec spec;
  spec.eta_max = lr_max;
  spec.eta_min = lr_min;
  spec.t_warmup = lr_warmup;
  spec.total_steps = resolved_lr_total();
  return spec;
}

std::string ExperimentConfig::strategy_tag() const {
  if (mode == RunMode::kSync) {
    switch (outer_opt) {
      case OuterOptKind::kSgd: return "sync/sgd";
      case OuterOptKind::kMomentum: return "sync/momentum";
      case OuterOptKind::kNesterov: return "sync/nesterov";
      case OuterOptKind::kAdam: return "sync/adam";
    }
  }
  std::string tag = "async/";
  switch (strategy) {
    case StrategyKind::kVanilla:
      switch (outer_opt) {
        case OuterOptKind::kSgd: tag += "sgd"; break;
        case OuterOptKind::kMomentum: tag += "momentum"; break;
        case OuterOptKind::kNesterov: tag += "nesterov"; break;
        case OuterOptKind::kAdam: tag += "adam"; break;
      }
      break;
    case StrategyKind::kPoly: tag += "poly"; break;
    case StrategyKind::kPolyThres: tag += "polythres"; break;
    case StrategyKind::kDelayComp: tag += "delay_comp"; break;
    case StrategyKind::kAsyncBuffer: tag += "async_buffer"; break;
    case StrategyKind::kDelayedNesterov: tag += "delayed_nesterov"; break;
  }
  if (dylu) tag += "+dylu";
  return tag;
}

namespace {

using Setter = std::function<void(ExperimentConfig&, const std::string& key,
                                  const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"data.classes",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.data_classes = static_cast<int>(parse_long(k, v));
       }},
      {"data.components_per_class",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.data_components_per_class = static_cast<int>(parse_long(k, v));
       }},
      {"data.dim",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.data_dim = static_cast<int>(parse_long(k, v));
       }},
      {"data.points",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.data_points = parse_long(k, v);
       }},
      {"data.cov_scale",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.data_cov_scale = parse_double(k, v);
       }},
      {"data.shard_mode",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "iid") c.data_shard_mode = ShardMode::kIid;
         else if (v == "by_component") c.data_shard_mode = ShardMode::kByComponent;
         else bad_key(k, "expected 'iid' or 'by_component', got '" + v + "'");
       }},
      {"data.eval_points",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.data_eval_points = parse_long(k, v);
       }},
      {"model.hidden_dims",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.model_hidden_dims.clear();
         for (const auto& part : split_list(v))
           c.model_hidden_dims.push_back(static_cast<int>(parse_long(k, part)));
       }},
      {"model.activation",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "relu") c.model_activation = Activation::kRelu;
         else if (v == "tanh") c.model_activation = Activation::kTanh;
         else bad_key(k, "expected 'relu' or 'tanh', got '" + v + "'");
       }},
      {"sched.workers",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.workers = static_cast<int>(parse_long(k, v));
       }},
      {"sched.profile",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "no") c.profile = SpeedProfile::kNo;
         else if (v == "slight") c.profile = SpeedProfile::kSlight;
         else if (v == "moderate") c.profile = SpeedProfile::kModerate;
         else if (v == "very") c.profile = SpeedProfile::kVery;
         else if (v == "explicit") c.profile = SpeedProfile::kExplicit;
         else bad_key(k, "expected one of no/slight/moderate/very/explicit, got '" + v + "'");
       }},
      {"sched.speeds",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.explicit_speeds.clear();
         for (const auto& part : split_list(v))
           c.explicit_speeds.push_back(parse_double(k, part));
         c.profile = SpeedProfile::kExplicit;
       }},
      {"sched.mode",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "async") c.mode = RunMode::kAsync;
         else if (v == "sync") c.mode = RunMode::kSync;
         else bad_key(k, "expected 'async' or 'sync', got '" + v + "'");
       }},
      {"sched.h_steps",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.h_steps = static_cast<int>(parse_long(k, v));
       }},
      {"sched.dylu",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.dylu = parse_bool(k, v);
       }},
      {"sched.grace_period",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "auto") c.grace_period = -1.0;
         else c.grace_period = parse_double(k, v);
       }},
      {"sched.t_max",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.t_max = parse_long(k, v);
       }},
      {"sched.eval_every",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.eval_every = parse_long(k, v);
       }},
      {"inner.opt",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "sgd") c.inner_opt = InnerOptKind::kSgd;
         else if (v == "adamw") c.inner_opt = InnerOptKind::kAdamW;
         else bad_key(k, "expected 'sgd' or 'adamw', got '" + v + "'");
       }},
      {"inner.beta1",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.inner_beta1 = parse_double(k, v);
       }},
      {"inner.beta2",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.inner_beta2 = parse_double(k, v);
       }},
      {"inner.eps",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.inner_eps = parse_double(k, v);
       }},
      {"inner.weight_decay",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.inner_weight_decay = parse_double(k, v);
       }},
      {"inner.batch_size",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.batch_size = static_cast<int>(parse_long(k, v));
       }},
      {"lr.max",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.lr_max = parse_double(k, v);
       }},
      {"lr.min",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.lr_min = parse_double(k, v);
       }},
      {"lr.warmup",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.lr_warmup = parse_long(k, v);
       }},
      {"lr.total",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.lr_total = parse_long(k, v);
       }},
      {"outer.strategy",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "vanilla") c.strategy = StrategyKind::kVanilla;
         else if (v == "poly") c.strategy = StrategyKind::kPoly;
         else if (v == "polythres") c.strategy = StrategyKind::kPolyThres;
         else if (v == "delay_comp") c.strategy = StrategyKind::kDelayComp;
         else if (v == "async_buffer") c.strategy = StrategyKind::kAsyncBuffer;
         else if (v == "delayed_nesterov") c.strategy = StrategyKind::kDelayedNesterov;
         else
           bad_key(k,
                   "expected one of vanilla/poly/polythres/delay_comp/async_buffer/"
                   "delayed_nesterov, got '" + v + "'");
       }},
      {"outer.opt",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "sgd") c.outer_opt = OuterOptKind::kSgd;
         else if (v == "momentum") c.outer_opt = OuterOptKind::kMomentum;
         else if (v == "nesterov") c.outer_opt = OuterOptKind::kNesterov;
         else if (v == "adam") c.outer_opt = OuterOptKind::kAdam;
         else bad_key(k, "expected one of sgd/momentum/nesterov/adam, got '" + v + "'");
       }},
      {"outer.lr",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.outer_lr = parse_double(k, v);
       }},
      {"outer.beta",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.outer_beta = parse_double(k, v);
       }},
      {"outer.n",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.outer_n = static_cast<int>(parse_long(k, v));
       }},
      {"outer.c",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.outer_c = parse_double(k, v);
       }},
      {"outer.poly_exponent",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.poly_exponent = parse_double(k, v);
       }},
      {"outer.staleness_threshold",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "inf") c.staleness_threshold = kNoStalenessThreshold;
         else c.staleness_threshold = static_cast<int>(parse_long(k, v));
       }},
      {"outer.lambda",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.delay_lambda = parse_double(k, v);
       }},
      {"seed.data",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.seed_data = static_cast<std::uint64_t>(parse_long(k, v));
       }},
      {"seed.init",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.seed_init = static_cast<std::uint64_t>(parse_long(k, v));
       }},
      {"seed.run",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.seed_run = static_cast<std::uint64_t>(parse_long(k, v));
       }},
  };
  return table;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig config;
  std::stringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << "config line " << line_no << ": expected key=value, got '" << stripped << "'";
      throw std::invalid_argument(msg.str());
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end())
      throw std::invalid_argument("unknown config key: '" + key + "'");
    it->second(config, key, value);
  }
  config.validate();
  return config;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace asgd
