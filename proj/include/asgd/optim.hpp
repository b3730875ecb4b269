#pragma once

#include <optional>
#include <vector>

namespace asgd {

// Per-shard learning rate schedule: linear warmup to eta_max, then cosine
// decay to eta_min. Past total_steps the rate stays clamped at eta_min so
// progress continues if a shard overruns its target budget.
struct LrScheduleSpec {
  double eta_max = 0.02;
  double eta_min = 1e-4;
  long t_warmup = 100;
  long total_steps = 5000;

  void validate() const;
};

double lr_at(const LrScheduleSpec& spec, long t);

// ---- inner (worker-side) optimizers, applied to true gradients ----

void sgd_step(std::vector<double>& params, const std::vector<double>& grad, double lr);

struct AdamWState {
  std::vector<double> m, v;
  long t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.1;

  void step(std::vector<double>& params, const std::vector<double>& grad, double lr);
};

// ---- outer (server-side) optimizers, applied to pseudo-gradients ----

struct OuterSgd {
  void step(std::vector<double>& params, const std::vector<double>& g, double eps_lr);
};

struct OuterMomentum {
  std::vector<double> m;
  double beta = 0.9;
  void step(std::vector<double>& params, const std::vector<double>& g, double eps_lr);
};

// theta <- theta - eps*(beta*m_new + g) with m_new = beta*m + g; algebraically
// equal to the beta^2*m_old + (1+beta)*g form, with one state vector.
struct OuterNesterov {
  std::vector<double> m;
  double beta = 0.9;
  void step(std::vector<double>& params, const std::vector<double>& g, double eps_lr);
};

struct OuterAdam {
  std::vector<double> m, v;
  long t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_adam = 1e-8;
  void step(std::vector<double>& params, const std::vector<double>& g, double eps_lr);
};

// Buffers pseudo-gradients and runs the Nesterov update once every n server
// updates; takes SGD-like steps (plus a c-fraction of the held momentum) in
// between. With n == 1 every step flushes and this is exactly OuterNesterov.
struct DelayedNesterov {
  std::vector<double> m;       // momentum, updated only at flush
  std::vector<double> buffer;  // aggregated pseudo-gradients since last flush
  long t = 0;                  // server updates received
  int n = 1;                   // buffer size N >= 1
  double c = 0.0;              // momentum activation, in [0, 1/N]
  double beta = 0.9;

  void validate() const;
  void step(std::vector<double>& params, const std::vector<double>& g, double eps_lr);
};

// ---- pseudo-gradient plumbing ----

struct PseudoGradient {
  std::vector<double> delta;  // theta_base - theta_final
  int worker_id = -1;
  long base_version = 0;   // server model version the job started from
  long staleness = 0;      // server version at application minus base_version
};

// Sentinel for "no staleness threshold".
inline constexpr int kNoStalenessThreshold = -1;

// delta <- (1 + staleness)^(-exponent) * delta
PseudoGradient poly_discount(PseudoGradient g, double exponent = 0.5);

// Drops updates staler than the threshold (boundary inclusive: staleness ==
// threshold passes). A negative threshold never discards.
std::optional<PseudoGradient> staleness_filter(PseudoGradient g,
                                               int threshold = 10);

// First-order Taylor correction with a diagonal outer-product curvature
// estimate: delta <- delta + lambda * (delta*delta) * (theta_now - theta_base).
PseudoGradient delay_compensate(PseudoGradient g,
                                const std::vector<double>& theta_now,
                                const std::vector<double>& theta_base,
                                double lambda = 0.5);

// FIFO pseudo-gradient buffer. push returns the elementwise mean of the held
// deltas once capacity is reached, emptying the buffer; nothing otherwise.
struct GradientBuffer {
  int capacity = 1;
  std::vector<std::vector<double>> items;

  std::optional<std::vector<double>> push(std::vector<double> delta);
  int size() const { return static_cast<int>(items.size()); }
};

// Closed form for 4 consecutive Nesterov applications of one gradient g:
//   m4 = b^4 m0 + (1+b+b^2+b^3) g
//   total/eps = (4+4b+3b^2+2b^3+b^4) g + b^2 (1+b+b^2+b^3) m0
struct SequentialNesterovClosedForm {
  std::vector<double> m_final;
  std::vector<double> total_step_over_eps;
};

SequentialNesterovClosedForm sequential_nesterov_closed_form(
    const std::vector<double>& m0, const std::vector<double>& g, double beta,
    int k);

}  // namespace asgd
