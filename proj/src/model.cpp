#include "asgd/model.hpp"

#include <cmath>
#include <stdexcept>

#include "asgd/kernels.hpp"
#include "asgd/rng.hpp"

namespace asgd {

Mlp::Mlp(MlpConfig config) : config_(std::move(config)) { config_.validate(); }

ParamVector Mlp::init_params(std::uint64_t seed) const {
  const auto dims = config_.layer_dims();
  ParamVector params;
  params.values.reserve(config_.param_count());
  Rng rng(seed);
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    const int in = dims[l], out = dims[l + 1];
    params.shapes.push_back({in, out});
    const double bound = std::sqrt(6.0 / (in + out));
    for (long i = 0; i < static_cast<long>(in) * out; ++i)
      params.values.push_back(rng.uniform(-bound, bound));
    for (int i = 0; i < out; ++i) params.values.push_back(0.0);
  }
  return params;
}

void Mlp::check_shapes(const ParamVector& params, const Batch& batch) const {
  if (params.size() != config_.param_count())
    throw std::invalid_argument("Mlp: parameter vector does not match config");
  if (batch.cols != config_.input_dim)
    throw std::invalid_argument("Mlp: batch width does not match input_dim");
  batch.validate(config_.num_classes);
}

namespace {

struct ForwardPass {
  // pre[l] holds layer l's pre-activation, act[l] its activation output;
  // act.back() is unused (logits are pre.back()).
  std::vector<std::vector<double>> pre;
  std::vector<std::vector<double>> act;
  std::vector<double> row_loss;
};

void run_forward(const MlpConfig& cfg, const ParamVector& params,
                 const Batch& batch, ForwardPass& fp) {
  const auto dims = cfg.layer_dims();
  const int layers = static_cast<int>(dims.size()) - 1;
  fp.pre.resize(layers);
  fp.act.resize(layers);
  const double* input = batch.inputs.data();
  for (int l = 0; l < layers; ++l) {
    const int in = dims[l], out = dims[l + 1];
    fp.pre[l].assign(static_cast<size_t>(batch.rows) * out, 0.0);
    kernels::linear_forward(input, params.values.data() + params.weight_offset(l),
                            params.values.data() + params.bias_offset(l),
                            fp.pre[l].data(), batch.rows, in, out);
    if (l + 1 < layers) {
      fp.act[l].assign(fp.pre[l].size(), 0.0);
      if (cfg.activation == Activation::kRelu)
        kernels::relu_forward(fp.pre[l].data(), fp.act[l].data(),
                              static_cast<long>(fp.pre[l].size()));
      else
        kernels::tanh_forward(fp.pre[l].data(), fp.act[l].data(),
                              static_cast<long>(fp.pre[l].size()));
      input = fp.act[l].data();
    }
  }
  fp.row_loss.assign(batch.rows, 0.0);
}

}  // namespace

double Mlp::forward_loss(const ParamVector& params, const Batch& batch) const {
  check_shapes(params, batch);
  ForwardPass fp;
  run_forward(config_, params, batch, fp);
  kernels::softmax_xent(fp.pre.back().data(), batch.labels.data(),
                        fp.row_loss.data(), nullptr, 0.0, batch.rows,
                        config_.num_classes);
  return kernels::sum_ordered(fp.row_loss.data(), batch.rows) / batch.rows;
}

BackwardResult Mlp::backward(const ParamVector& params, const Batch& batch) const {
  check_shapes(params, batch);
  const auto dims = config_.layer_dims();
  const int layers = static_cast<int>(dims.size()) - 1;

  ForwardPass fp;
  run_forward(config_, params, batch, fp);

  BackwardResult result;
  result.grad = ParamVector::zeros_like(params);

  std::vector<double> dz(static_cast<size_t>(batch.rows) * config_.num_classes);
  kernels::softmax_xent(fp.pre.back().data(), batch.labels.data(),
                        fp.row_loss.data(), dz.data(), 1.0 / batch.rows,
                        batch.rows, config_.num_classes);
  result.loss = kernels::sum_ordered(fp.row_loss.data(), batch.rows) / batch.rows;

  for (int l = layers - 1; l >= 0; --l) {
    const int in = dims[l], out = dims[l + 1];
    const double* layer_input = l == 0 ? batch.inputs.data() : fp.act[l - 1].data();
    kernels::linear_backward_params(layer_input, dz.data(),
                                    result.grad.values.data() + params.weight_offset(l),
                                    result.grad.values.data() + params.bias_offset(l),
                                    batch.rows, in, out);
    if (l > 0) {
      std::vector<double> da(static_cast<size_t>(batch.rows) * in);
      kernels::linear_backward_data(dz.data(),
                                    params.values.data() + params.weight_offset(l),
                                    da.data(), batch.rows, in, out);
      dz.assign(da.size(), 0.0);
      if (config_.activation == Activation::kRelu)
        kernels::relu_backward(fp.pre[l - 1].data(), da.data(), dz.data(),
                               static_cast<long>(da.size()));
      else
        kernels::tanh_backward(fp.act[l - 1].data(), da.data(), dz.data(),
                               static_cast<long>(da.size()));
    }
  }
  return result;
}

ParamVector Mlp::finite_diff_grad(const ParamVector& params, const Batch& batch,
                                  double h) const {
  if (h <= 0.0) throw std::invalid_argument("finite_diff_grad: h must be > 0");
  check_shapes(params, batch);
  ParamVector grad = ParamVector::zeros_like(params);
  ParamVector probe = params;
  for (long i = 0; i < params.size(); ++i) {
    const double saved = probe.values[i];
    probe.values[i] = saved + h;
    const double up = forward_loss(probe, batch);
    probe.values[i] = saved - h;
    const double down = forward_loss(probe, batch);
    probe.values[i] = saved;
    grad.values[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

EvalMetrics Mlp::eval_metrics(const ParamVector& params, const Batch& dataset) const {
  if (dataset.rows < 1) throw std::invalid_argument("eval_metrics: dataset is empty");
  check_shapes(params, dataset);
  ForwardPass fp;
  run_forward(config_, params, dataset, fp);
  const std::vector<double>& logits = fp.pre.back();
  kernels::softmax_xent(logits.data(), dataset.labels.data(), fp.row_loss.data(),
                        nullptr, 0.0, dataset.rows, config_.num_classes);

  EvalMetrics metrics;
  metrics.loss = kernels::sum_ordered(fp.row_loss.data(), dataset.rows) / dataset.rows;
  metrics.ppl = std::exp(metrics.loss);
  long correct = 0;
  const int classes = config_.num_classes;
  for (int r = 0; r < dataset.rows; ++r) {
    const double* row = logits.data() + static_cast<long>(r) * classes;
    int best = 0;
    for (int c = 1; c < classes; ++c)
      if (row[c] > row[best]) best = c;  // first max wins ties
    if (best == dataset.labels[r]) ++correct;
  }
  metrics.accuracy = static_cast<double>(correct) / dataset.rows;
  return metrics;
}

}  // namespace asgd
