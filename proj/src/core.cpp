#include "asgd/core.hpp"

#include <cmath>
#include <stdexcept>

namespace asgd {

void MlpConfig::validate() const {
  if (input_dim < 1) throw std::invalid_argument("MlpConfig: input_dim must be >= 1");
  if (num_classes < 2) throw std::invalid_argument("MlpConfig: num_classes must be >= 2");
  for (int h : hidden_dims)
    if (h < 1) throw std::invalid_argument("MlpConfig: every hidden dim must be >= 1");
}

std::vector<int> MlpConfig::layer_dims() const {
  std::vector<int> dims;
  dims.reserve(hidden_dims.size() + 2);
  dims.push_back(input_dim);
  for (int h : hidden_dims) dims.push_back(h);
  dims.push_back(num_classes);
  return dims;
}

long MlpConfig::param_count() const {
  const auto dims = layer_dims();
  long total = 0;
  for (size_t l = 0; l + 1 < dims.size(); ++l)
    total += static_cast<long>(dims[l]) * dims[l + 1] + dims[l + 1];
  return total;
}

bool ParamVector::all_finite() const {
  for (double v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

long ParamVector::weight_offset(int layer) const {
  long off = 0;
  for (int l = 0; l < layer; ++l)
    off += static_cast<long>(shapes[l].in) * shapes[l].out + shapes[l].out;
  return off;
}

long ParamVector::bias_offset(int layer) const {
  return weight_offset(layer) + static_cast<long>(shapes[layer].in) * shapes[layer].out;
}

ParamVector ParamVector::zeros_like(const ParamVector& other) {
  ParamVector out;
  out.values.assign(other.values.size(), 0.0);
  out.shapes = other.shapes;
  return out;
}

void Batch::push_row(const double* x, int label) {
  inputs.insert(inputs.end(), x, x + cols);
  labels.push_back(label);
  ++rows;
}

void Batch::validate(int num_classes) const {
  if (rows < 1) throw std::invalid_argument("Batch: must contain at least one row");
  if (inputs.size() != static_cast<size_t>(rows) * cols)
    throw std::invalid_argument("Batch: inputs size does not match rows x cols");
  if (labels.size() != static_cast<size_t>(rows))
    throw std::invalid_argument("Batch: labels size does not match rows");
  for (int y : labels)
    if (y < 0 || y >= num_classes)
      throw std::invalid_argument("Batch: label out of range");
}

}  // namespace asgd
