#pragma once

#include <string>
#include <vector>

namespace asgd {

struct CheckReport {
  std::string name;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Homogeneous-speed async run with DelayedNesterov(N = k) against the
// synchronous reference; compares parameters at every outer-round boundary.
// The two beta arguments exist so tests can inject a mismatch.
CheckReport check_sync_via_async(int rounds = 50, double beta_sync = 0.9,
                                 double beta_async = 0.9);

// DelayedNesterov with N = 1 must trace Nesterov exactly for any c.
CheckReport check_dn_equals_nesterov(int steps = 100);

// Four sequential Nesterov applications of one gradient against the closed
// form, for beta in {0.1, 0.5, 0.9}.
CheckReport check_sequential_nesterov();

// Analytic gradients against central finite differences on random draws.
CheckReport check_gradient_oracle(int draws = 100);

std::vector<CheckReport> run_all_checks();

}  // namespace asgd
