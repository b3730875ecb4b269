#pragma once

#include <string>
#include <vector>

#include "asgd/config.hpp"
#include "asgd/metrics.hpp"

namespace asgd {

// Runs the configured experiment and writes its metrics CSV to out_path.
// Returns the final row.
MetricsRow run_experiment_to_csv(const ExperimentConfig& config,
                                 const std::string& out_path);

struct SweepCell {
  std::string value;  // axis value as given
  ExperimentConfig config;
};

// Expands a sweep axis over the base config. Axes: heterogeneity (profile
// names), workers (ints), c_value (reals), strategy (vanilla_sgd,
// vanilla_momentum, vanilla_nesterov, vanilla_adam, poly, polythres,
// delay_comp, async_buffer, dn, dn_dylu).
std::vector<SweepCell> expand_sweep(const ExperimentConfig& base,
                                    const std::string& axis,
                                    const std::vector<std::string>& values);

struct SweepCellResult {
  std::string value;
  std::string csv_path;
  bool ok = false;
  std::string error;
  MetricsRow final_row;
};

// Runs every cell (cells execute in parallel, one experiment instance each),
// writes one CSV per cell plus <out_dir>/summary.csv. Failed cells are
// reported in the summary and the return value; remaining cells still run.
std::vector<SweepCellResult> run_sweep(const ExperimentConfig& base,
                                       const std::string& axis,
                                       const std::vector<std::string>& values,
                                       const std::string& out_dir);

// Writes the generated training dataset with shard assignments as CSV with
// header x0,...,x{d-1},label,shard_id.
void dump_dataset_csv(const ExperimentConfig& config, const std::string& out_path);

}  // namespace asgd
