#include "asgd/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace asgd::kernels {

namespace {
// Serial by default: at simulator scale the matrices are far too small to
// amortize a fork/join, and sweeps already parallelize across cells. The
// parallel backend pays off from roughly 10^5-element operands upward; see
// tools/bench_kernels.
Backend g_backend = Backend::kSerial;
}

bool openmp_compiled() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

Backend active_backend() { return g_backend; }
void set_backend(Backend b) { g_backend = b; }

void linear_forward_serial(const double* x, const double* w, const double* b,
                           double* y, int rows, int in_dim, int out_dim) {
  for (int r = 0; r < rows; ++r) {
    const double* xr = x + static_cast<long>(r) * in_dim;
    double* yr = y + static_cast<long>(r) * out_dim;
    for (int j = 0; j < out_dim; ++j) {
      double acc = b[j];
      for (int k = 0; k < in_dim; ++k) acc += xr[k] * w[static_cast<long>(k) * out_dim + j];
      yr[j] = acc;
    }
  }
}

void linear_forward_parallel(const double* x, const double* w, const double* b,
                             double* y, int rows, int in_dim, int out_dim) {
#pragma omp parallel for schedule(static)
  for (int r = 0; r < rows; ++r) {
    const double* xr = x + static_cast<long>(r) * in_dim;
    double* yr = y + static_cast<long>(r) * out_dim;
    for (int j = 0; j < out_dim; ++j) {
      double acc = b[j];
      for (int k = 0; k < in_dim; ++k) acc += xr[k] * w[static_cast<long>(k) * out_dim + j];
      yr[j] = acc;
    }
  }
}

void linear_forward(const double* x, const double* w, const double* b,
                    double* y, int rows, int in_dim, int out_dim) {
  if (g_backend == Backend::kParallel)
    linear_forward_parallel(x, w, b, y, rows, in_dim, out_dim);
  else
    linear_forward_serial(x, w, b, y, rows, in_dim, out_dim);
}

void linear_backward_data_serial(const double* dy, const double* w, double* dx,
                                 int rows, int in_dim, int out_dim) {
  for (int r = 0; r < rows; ++r) {
    const double* dyr = dy + static_cast<long>(r) * out_dim;
    double* dxr = dx + static_cast<long>(r) * in_dim;
    for (int k = 0; k < in_dim; ++k) {
      double acc = 0.0;
      for (int j = 0; j < out_dim; ++j) acc += dyr[j] * w[static_cast<long>(k) * out_dim + j];
      dxr[k] = acc;
    }
  }
}

void linear_backward_data_parallel(const double* dy, const double* w,
                                   double* dx, int rows, int in_dim,
                                   int out_dim) {
#pragma omp parallel for schedule(static)
  for (int r = 0; r < rows; ++r) {
    const double* dyr = dy + static_cast<long>(r) * out_dim;
    double* dxr = dx + static_cast<long>(r) * in_dim;
    for (int k = 0; k < in_dim; ++k) {
      double acc = 0.0;
      for (int j = 0; j < out_dim; ++j) acc += dyr[j] * w[static_cast<long>(k) * out_dim + j];
      dxr[k] = acc;
    }
  }
}

void linear_backward_data(const double* dy, const double* w, double* dx,
                          int rows, int in_dim, int out_dim) {
  if (g_backend == Backend::kParallel)
    linear_backward_data_parallel(dy, w, dx, rows, in_dim, out_dim);
  else
    linear_backward_data_serial(dy, w, dx, rows, in_dim, out_dim);
}

void linear_backward_params_serial(const double* x, const double* dy,
                                   double* dw, double* db, int rows,
                                   int in_dim, int out_dim) {
  for (int k = 0; k < in_dim; ++k) {
    for (int j = 0; j < out_dim; ++j) {
      double acc = 0.0;
      for (int r = 0; r < rows; ++r)
        acc += x[static_cast<long>(r) * in_dim + k] * dy[static_cast<long>(r) * out_dim + j];
      dw[static_cast<long>(k) * out_dim + j] = acc;
    }
  }
  for (int j = 0; j < out_dim; ++j) {
    double acc = 0.0;
    for (int r = 0; r < rows; ++r) acc += dy[static_cast<long>(r) * out_dim + j];
    db[j] = acc;
  }
}

void linear_backward_params_parallel(const double* x, const double* dy,
                                     double* dw, double* db, int rows,
                                     int in_dim, int out_dim) {
#pragma omp parallel for schedule(static)
  for (int k = 0; k < in_dim; ++k) {
    for (int j = 0; j < out_dim; ++j) {
      double acc = 0.0;
      for (int r = 0; r < rows; ++r)
        acc += x[static_cast<long>(r) * in_dim + k] * dy[static_cast<long>(r) * out_dim + j];
      dw[static_cast<long>(k) * out_dim + j] = acc;
    }
  }
#pragma omp parallel for schedule(static)
  for (int j = 0; j < out_dim; ++j) {
    double acc = 0.0;
    for (int r = 0; r < rows; ++r) acc += dy[static_cast<long>(r) * out_dim + j];
    db[j] = acc;
  }
}

void linear_backward_params(const double* x, const double* dy, double* dw,
                            double* db, int rows, int in_dim, int out_dim) {
  if (g_backend == Backend::kParallel)
    linear_backward_params_parallel(x, dy, dw, db, rows, in_dim, out_dim);
  else
    linear_backward_params_serial(x, dy, dw, db, rows, in_dim, out_dim);
}

void relu_forward_serial(const double* z, double* a, long n) {
  for (long i = 0; i < n; ++i) a[i] = z[i] > 0.0 ? z[i] : 0.0;
}

void relu_forward_parallel(const double* z, double* a, long n) {
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) a[i] = z[i] > 0.0 ? z[i] : 0.0;
}

void relu_forward(const double* z, double* a, long n) {
  if (g_backend == Backend::kParallel)
    relu_forward_parallel(z, a, n);
  else
    relu_forward_serial(z, a, n);
}

void relu_backward_serial(const double* z, const double* da, double* dz, long n) {
  for (long i = 0; i < n; ++i) dz[i] = z[i] > 0.0 ? da[i] : 0.0;
}

void relu_backward_parallel(const double* z, const double* da, double* dz, long n) {
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) dz[i] = z[i] > 0.0 ? da[i] : 0.0;
}

void relu_backward(const double* z, const double* da, double* dz, long n) {
  if (g_backend == Backend::kParallel)
    relu_backward_parallel(z, da, dz, n);
  else
    relu_backward_serial(z, da, dz, n);
}

void tanh_forward_serial(const double* z, double* a, long n) {
  for (long i = 0; i < n; ++i) a[i] = std::tanh(z[i]);
}

void tanh_forward_parallel(const double* z, double* a, long n) {
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) a[i] = std::tanh(z[i]);
}

void tanh_forward(const double* z, double* a, long n) {
  if (g_backend == Backend::kParallel)
    tanh_forward_parallel(z, a, n);
  else
    tanh_forward_serial(z, a, n);
}

void tanh_backward_serial(const double* a, const double* da, double* dz, long n) {
  for (long i = 0; i < n; ++i) dz[i] = da[i] * (1.0 - a[i] * a[i]);
}

void tanh_backward_parallel(const double* a, const double* da, double* dz, long n) {
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) dz[i] = da[i] * (1.0 - a[i] * a[i]);
}

void tanh_backward(const double* a, const double* da, double* dz, long n) {
  if (g_backend == Backend::kParallel)
    tanh_backward_parallel(a, da, dz, n);
  else
    tanh_backward_serial(a, da, dz, n);
}

namespace {
inline void softmax_xent_row(const double* z, int label, double* row_loss,
                             double* dz, double dloss_scale, int classes) {
  double zmax = z[0];
  for (int c = 1; c < classes; ++c) zmax = std::max(zmax, z[c]);
  double sumexp = 0.0;
  for (int c = 0; c < classes; ++c) sumexp += std::exp(z[c] - zmax);
  *row_loss = std::log(sumexp) + zmax - z[label];
  if (dz != nullptr) {
    for (int c = 0; c < classes; ++c) {
      const double p = std::exp(z[c] - zmax) / sumexp;
      dz[c] = (p - (c == label ? 1.0 : 0.0)) * dloss_scale;
    }
  }
}
}  // namespace

void softmax_xent_serial(const double* logits, const int* labels,
                         double* row_loss, double* dlogits, double dloss_scale,
                         int rows, int classes) {
  for (int r = 0; r < rows; ++r) {
    softmax_xent_row(logits + static_cast<long>(r) * classes, labels[r],
                     row_loss + r,
                     dlogits ? dlogits + static_cast<long>(r) * classes : nullptr,
                     dloss_scale, classes);
  }
}

void softmax_xent_parallel(const double* logits, const int* labels,
                           double* row_loss, double* dlogits,
                           double dloss_scale, int rows, int classes) {
#pragma omp parallel for schedule(static)
  for (int r = 0; r < rows; ++r) {
    softmax_xent_row(logits + static_cast<long>(r) * classes, labels[r],
                     row_loss + r,
                     dlogits ? dlogits + static_cast<long>(r) * classes : nullptr,
                     dloss_scale, classes);
  }
}

void softmax_xent(const double* logits, const int* labels, double* row_loss,
                  double* dlogits, double dloss_scale, int rows, int classes) {
  if (g_backend == Backend::kParallel)
    softmax_xent_parallel(logits, labels, row_loss, dlogits, dloss_scale, rows, classes);
  else
    softmax_xent_serial(logits, labels, row_loss, dlogits, dloss_scale, rows, classes);
}

void axpy_serial(double a, const double* x, double* y, long n) {
  for (long i = 0; i < n; ++i) y[i] += a * x[i];
}

void axpy_parallel(double a, const double* x, double* y, long n) {
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) y[i] += a * x[i];
}

void axpy(double a, const double* x, double* y, long n) {
  if (g_backend == Backend::kParallel)
    axpy_parallel(a, x, y, n);
  else
    axpy_serial(a, x, y, n);
}

double sum_ordered(const double* x, long n) {
  double acc = 0.0;
  for (long i = 0; i < n; ++i) acc += x[i];
  return acc;
}

}  // namespace asgd::kernels
