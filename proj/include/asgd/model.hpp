#pragma once

#include <cstdint>

#include "asgd/core.hpp"

namespace asgd {

struct BackwardResult {
  double loss = 0.0;
  ParamVector grad;
};

struct EvalMetrics {
  double loss = 0.0;
  double ppl = 0.0;
  double accuracy = 0.0;
};

// Feed-forward classifier with hand-written gradients. All arithmetic is in
// doubles with a fixed row-major, left-to-right summation order, so identical
// inputs give bit-identical outputs.
class Mlp {
 public:
  explicit Mlp(MlpConfig config);

  const MlpConfig& config() const { return config_; }

  // Glorot-uniform weights (+/- sqrt(6/(fan_in+fan_out))), zero biases.
  // Same (config, seed) yields the same vector bit-for-bit.
  ParamVector init_params(std::uint64_t seed) const;

  // Mean cross-entropy over the batch, computed with a stable log-sum-exp.
  double forward_loss(const ParamVector& params, const Batch& batch) const;

  // Loss plus its gradient; the loss is bit-identical to forward_loss.
  BackwardResult backward(const ParamVector& params, const Batch& batch) const;

  // Central-difference gradient oracle: (f(p+h*e_i) - f(p-h*e_i)) / 2h.
  ParamVector finite_diff_grad(const ParamVector& params, const Batch& batch,
                               double h = 1e-5) const;

  // Mean loss, exp(loss) and argmax accuracy on a held-out set.
  EvalMetrics eval_metrics(const ParamVector& params, const Batch& dataset) const;

 private:
  void check_shapes(const ParamVector& params, const Batch& batch) const;

  MlpConfig config_;
};

}  // namespace asgd
