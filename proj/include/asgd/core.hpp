#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace asgd {

enum class Activation { kRelu, kTanh };

// Architecture of the feed-forward classifier. An empty hidden_dims list is
// plain softmax regression.
struct MlpConfig {
  int input_dim = 2;
  std::vector<int> hidden_dims = {32};
  int num_classes = 4;
  Activation activation = Activation::kRelu;

  void validate() const;
  // Layer dimensions including input and output: [in, h0, ..., classes].
  std::vector<int> layer_dims() const;
  long param_count() const;
};

// Shape of one dense layer: weight matrix (in x out, row-major) followed by
// a bias vector of length out.
struct LayerShape {
  int in = 0;
  int out = 0;
};

// Flat model parameters plus per-layer shape metadata.
struct ParamVector {
  std::vector<double> values;
  std::vector<LayerShape> shapes;

  long size() const { return static_cast<long>(values.size()); }
  bool all_finite() const;
  // Offset of layer l's weight block; biases follow the weights.
  long weight_offset(int layer) const;
  long bias_offset(int layer) const;

  static ParamVector zeros_like(const ParamVector& other);
};

// A dense batch of rows with integer class labels.
struct Batch {
  int rows = 0;
  int cols = 0;
  std::vector<double> inputs;  // row-major, rows x cols
  std::vector<int> labels;     // size rows

  double at(int r, int c) const { return inputs[static_cast<size_t>(r) * cols + c]; }
  void push_row(const double* x, int label);
  void validate(int num_classes) const;
};

}  // namespace asgd
