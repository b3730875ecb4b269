#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "asgd/config.hpp"
#include "asgd/metrics.hpp"
#include "asgd/runner.hpp"
#include "asgd/validate.hpp"

namespace {

std::vector<std::string> split_values(const std::string& list) {
  std::vector<std::string> out;
  std::string item;
  for (char ch : list) {
    if (ch == ',') {
      if (!item.empty()) out.push_back(item);
      item.clear();
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      item += ch;
    }
  }
  if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asynchronous Local-SGD training simulator"};
  app.require_subcommand(1);

  std::string config_path, out_path, axis, values_list, out_dir;

  CLI::App* run_cmd = app.add_subcommand("run", "Run one experiment and write its metrics CSV");
  run_cmd->add_option("--config", config_path, "Config file (flat key=value)")->required();
  run_cmd->add_option("--out", out_path, "Output CSV path")->required();

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run a sweep over one experiment axis");
  sweep_cmd->add_option("--config", config_path, "Base config file")->required();
  sweep_cmd->add_option("--axis", axis, "heterogeneity | workers | c_value | strategy")->required();
  sweep_cmd->add_option("--values", values_list, "Comma-separated axis values")->required();
  sweep_cmd->add_option("--out-dir", out_dir, "Directory for per-cell CSVs and summary.csv")->required();

  CLI::App* validate_cmd =
      app.add_subcommand("validate", "Run the built-in equivalence checks");
  (void)validate_cmd;

  CLI::App* dump_cmd =
      app.add_subcommand("dump-dataset", "Write the generated dataset with shard ids as CSV");
  dump_cmd->add_option("--config", config_path, "Config file")->required();
  dump_cmd->add_option("--out", out_path, "Output CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      const asgd::ExperimentConfig config = asgd::load_config_file(config_path);
      const asgd::MetricsRow final_row = asgd::run_experiment_to_csv(config, out_path);
      std::printf("%s\n", asgd::row_to_csv(final_row).c_str());
      return 0;
    }
    if (sweep_cmd->parsed()) {
      const asgd::ExperimentConfig base = asgd::load_config_file(config_path);
      const auto results = asgd::run_sweep(base, axis, split_values(values_list), out_dir);
      bool all_ok = true;
      for (const auto& r : results) {
        if (r.ok) {
          std::printf("%s=%s final_loss=%s (%s)\n", axis.c_str(), r.value.c_str(),
                      asgd::format_double(r.final_row.eval_loss).c_str(),
                      r.csv_path.c_str());
        } else {
          std::printf("%s=%s FAILED: %s\n", axis.c_str(), r.value.c_str(), r.error.c_str());
          all_ok = false;
        }
      }
      return all_ok ? 0 : 1;
    }
    if (validate_cmd->parsed()) {
      bool all_pass = true;
      for (const auto& report : asgd::run_all_checks()) {
        std::printf("%s %s (max deviation %.3e, tolerance %.0e)\n",
                    report.pass ? "PASS" : "FAIL", report.name.c_str(),
                    report.max_deviation, report.tolerance);
        all_pass = all_pass && report.pass;
      }
      return all_pass ? 0 : 1;
    }
    if (dump_cmd->parsed()) {
      const asgd::ExperimentConfig config = asgd::load_config_file(config_path);
      asgd::dump_dataset_csv(config, out_path);
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
