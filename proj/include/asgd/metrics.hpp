#pragma once

#include <string>
#include <vector>

namespace asgd {

struct MetricsRow {
  long server_update = 0;
  long local_updates = 0;
  double sim_time_s = 0.0;
  double eval_loss = 0.0;
  double eval_ppl = 0.0;
  double eval_acc = 0.0;
  std::string strategy;  // tag only; not part of the CSV schema
};

struct MetricsLog {
  std::vector<MetricsRow> rows;
};

inline constexpr const char* kCsvHeader =
    "server_update,local_updates,sim_time_s,eval_loss,eval_ppl,eval_acc";

// Fixed %.12g rendering so identical runs serialize byte-identically.
std::string format_double(double x);

std::string row_to_csv(const MetricsRow& row);
std::string to_csv(const MetricsLog& log);
void write_csv(const MetricsLog& log, const std::string& path);

}  // namespace asgd
