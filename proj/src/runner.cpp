#include "asgd/runner.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "asgd/datagen.hpp"
#include "asgd/sim.hpp"

namespace asgd {

MetricsRow run_experiment_to_csv(const ExperimentConfig& config,
                                 const std::string& out_path) {
  Simulation sim(config);
  const MetricsLog log = sim.run();
  write_csv(log, out_path);
  return log.rows.back();
}

namespace {

ExperimentConfig cell_config(const ExperimentConfig& base, const std::string& axis,
                             const std::string& value) {
  ExperimentConfig cfg = base;
  if (axis == "heterogeneity") {
    if (value == "no") cfg.profile = SpeedProfile::kNo;
    else if (value == "slight") cfg.profile = SpeedProfile::kSlight;
    else if (value == "moderate") cfg.profile = SpeedProfile::kModerate;
    else if (value == "very") cfg.profile = SpeedProfile::kVery;
    else throw std::invalid_argument("sweep heterogeneity: unknown profile '" + value + "'");
  } else if (axis == "workers") {
    if (base.profile == SpeedProfile::kExplicit)
      throw std::invalid_argument("sweep workers: requires a named speed profile");
    cfg.workers = std::stoi(value);
  } else if (axis == "c_value") {
    cfg.outer_c = std::stod(value);
  } else if (axis == "strategy") {
    cfg.dylu = base.dylu;
    if (value == "vanilla_sgd") { cfg.strategy = StrategyKind::kVanilla; cfg.outer_opt = OuterOptKind::kSgd; }
    else if (value == "vanilla_momentum") { cfg.strategy = StrategyKind::kVanilla; cfg.outer_opt = OuterOptKind::kMomentum; }
    else if (value == "vanilla_nesterov") { cfg.strategy = StrategyKind::kVanilla; cfg.outer_opt = OuterOptKind::kNesterov; }
    else if (value == "vanilla_adam") { cfg.strategy = StrategyKind::kVanilla; cfg.outer_opt = OuterOptKind::kAdam; }
    else if (value == "poly") cfg.strategy = StrategyKind::kPoly;
    else if (value == "polythres") cfg.strategy = StrategyKind::kPolyThres;
    else if (value == "delay_comp") cfg.strategy = StrategyKind::kDelayComp;
    else if (value == "async_buffer") cfg.strategy = StrategyKind::kAsyncBuffer;
    else if (value == "dn") cfg.strategy = StrategyKind::kDelayedNesterov;
    else if (value == "dn_dylu") { cfg.strategy = StrategyKind::kDelayedNesterov; cfg.dylu = true; }
    else throw std::invalid_argument("sweep strategy: unknown strategy '" + value + "'");
  } else {
    throw std::invalid_argument("unknown sweep axis: '" + axis + "' (expected "
                                "heterogeneity, workers, c_value or strategy)");
  }
  cfg.validate();
  return cfg;
}

std::string sanitize(const std::string& s) {
  std::string out = s;
  for (char& ch : out)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '.' && ch != '-') ch = '_';
  return out;
}

}  // namespace

std::vector<SweepCell> expand_sweep(const ExperimentConfig& base,
                                    const std::string& axis,
                                    const std::vector<std::string>& values) {
  if (values.empty()) throw std::invalid_argument("sweep: no values given");
  std::vector<SweepCell> cells;
  cells.reserve(values.size());
  for (const std::string& v : values) cells.push_back({v, cell_config(base, axis, v)});
  return cells;
}

std::vector<SweepCellResult> run_sweep(const ExperimentConfig& base,
                                       const std::string& axis,
                                       const std::vector<std::string>& values,
                                       const std::string& out_dir) {
  if (values.empty()) throw std::invalid_argument("sweep: no values given");
  if (axis != "heterogeneity" && axis != "workers" && axis != "c_value" &&
      axis != "strategy")
    throw std::invalid_argument("unknown sweep axis: '" + axis + "' (expected "
                                "heterogeneity, workers, c_value or strategy)");
  std::filesystem::create_directories(out_dir);

  // a bad cell is reported and skipped; the remaining cells still run
  std::vector<SweepCellResult> results(values.size());
  const int n = static_cast<int>(values.size());
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    SweepCellResult& result = results[i];
    result.value = values[i];
    result.csv_path =
        (std::filesystem::path(out_dir) / (axis + "_" + sanitize(values[i]) + ".csv"))
            .string();
    try {
      const ExperimentConfig cfg = cell_config(base, axis, values[i]);
      result.final_row = run_experiment_to_csv(cfg, result.csv_path);
      result.ok = true;
    } catch (const std::exception& e) {
      result.ok = false;
      result.error = e.what();
    }
  }

  const std::string summary_path =
      (std::filesystem::path(out_dir) / "summary.csv").string();
  std::ofstream summary(summary_path, std::ios::binary);
  if (!summary) throw std::runtime_error("cannot open output file: " + summary_path);
  summary << "axis,value,status,server_updates,local_updates,sim_time_s,"
             "final_eval_loss,final_eval_ppl,final_eval_acc\n";
  for (const SweepCellResult& r : results) {
    summary << axis << ',' << r.value << ',' << (r.ok ? "ok" : "failed") << ',';
    if (r.ok) {
      summary << r.final_row.server_update << ',' << r.final_row.local_updates << ','
              << format_double(r.final_row.sim_time_s) << ','
              << format_double(r.final_row.eval_loss) << ','
              << format_double(r.final_row.eval_ppl) << ','
              << format_double(r.final_row.eval_acc);
    } else {
      summary << ",,,,";
    }
    summary << '\n';
  }
  if (!summary) throw std::runtime_error("failed while writing: " + summary_path);
  return results;
}

void dump_dataset_csv(const ExperimentConfig& config, const std::string& out_path) {
  const Dataset dataset = generate_dataset(config.mixture_spec());
  const auto shards = split_shards(dataset, config.workers, config.data_shard_mode,
                                   derive_seed(config.seed_data, 101));
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + out_path);
  for (int d = 0; d < config.data_dim; ++d) out << 'x' << d << ',';
  out << "label,shard_id\n";
  for (const Shard& shard : shards) {
    for (int r = 0; r < shard.points.rows; ++r) {
      for (int d = 0; d < shard.points.cols; ++d)
        out << format_double(shard.points.at(r, d)) << ',';
      out << shard.points.labels[r] << ',' << shard.id << '\n';
    }
  }
  if (!out) throw std::runtime_error("failed while writing: " + out_path);
}

}  // namespace asgd
