#include "asgd/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace asgd {

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

std::string row_to_csv(const MetricsRow& row) {
  std::string out;
  out += std::to_string(row.server_update);
  out += ',';
  out += std::to_string(row.local_updates);
  out += ',';
  out += format_double(row.sim_time_s);
  out += ',';
  out += format_double(row.eval_loss);
  out += ',';
  out += format_double(row.eval_ppl);
  out += ',';
  out += format_double(row.eval_acc);
  return out;
}

std::string to_csv(const MetricsLog& log) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const MetricsRow& row : log.rows) {
    out += row_to_csv(row);
    out += '\n';
  }
  return out;
}

void write_csv(const MetricsLog& log, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << to_csv(log);
  if (!out) throw std::runtime_error("failed while writing: " + path);
}

}  // namespace asgd
