#pragma once

// Dense kernels behind the model math. Every kernel has a serial reference
// implementation and an OpenMP one; both compute each output element with an
// identical left-to-right inner loop, so results are bit-identical regardless
// of backend or thread count. tools/bench_kernels compares their throughput.

namespace asgd::kernels {

enum class Backend { kSerial, kParallel };

Backend active_backend();
void set_backend(Backend b);
bool openmp_compiled();

// y[rows x out] = x[rows x in] * w[in x out] + b[out]
void linear_forward_serial(const double* x, const double* w, const double* b,
                           double* y, int rows, int in_dim, int out_dim);
void linear_forward_parallel(const double* x, const double* w, const double* b,
                             double* y, int rows, int in_dim, int out_dim);
void linear_forward(const double* x, const double* w, const double* b,
                    double* y, int rows, int in_dim, int out_dim);

// dx[rows x in] = dy[rows x out] * w^T
void linear_backward_data_serial(const double* dy, const double* w, double* dx,
                                 int rows, int in_dim, int out_dim);
void linear_backward_data_parallel(const double* dy, const double* w,
                                   double* dx, int rows, int in_dim,
                                   int out_dim);
void linear_backward_data(const double* dy, const double* w, double* dx,
                          int rows, int in_dim, int out_dim);

// dw[in x out] = x^T * dy ; db[out] = column sums of dy
void linear_backward_params_serial(const double* x, const double* dy,
                                   double* dw, double* db, int rows,
                                   int in_dim, int out_dim);
void linear_backward_params_parallel(const double* x, const double* dy,
                                     double* dw, double* db, int rows,
                                     int in_dim, int out_dim);
void linear_backward_params(const double* x, const double* dy, double* dw,
                            double* db, int rows, int in_dim, int out_dim);

void relu_forward_serial(const double* z, double* a, long n);
void relu_forward_parallel(const double* z, double* a, long n);
void relu_forward(const double* z, double* a, long n);

// dz = da where z > 0 else 0
void relu_backward_serial(const double* z, const double* da, double* dz, long n);
void relu_backward_parallel(const double* z, const double* da, double* dz, long n);
void relu_backward(const double* z, const double* da, double* dz, long n);

void tanh_forward_serial(const double* z, double* a, long n);
void tanh_forward_parallel(const double* z, double* a, long n);
void tanh_forward(const double* z, double* a, long n);

// dz = da * (1 - a^2), a = tanh(z)
void tanh_backward_serial(const double* a, const double* da, double* dz, long n);
void tanh_backward_parallel(const double* a, const double* da, double* dz, long n);
void tanh_backward(const double* a, const double* da, double* dz, long n);

// Stable per-row softmax cross-entropy. row_loss[r] = lse(z_r) - z_r[label].
// When dlogits is non-null it receives (softmax - onehot) * dloss_scale.
void softmax_xent_serial(const double* logits, const int* labels,
                         double* row_loss, double* dlogits, double dloss_scale,
                         int rows, int classes);
void softmax_xent_parallel(const double* logits, const int* labels,
                           double* row_loss, double* dlogits,
                           double dloss_scale, int rows, int classes);
void softmax_xent(const double* logits, const int* labels, double* row_loss,
                  double* dlogits, double dloss_scale, int rows, int classes);

// y += a * x
void axpy_serial(double a, const double* x, double* y, long n);
void axpy_parallel(double a, const double* x, double* y, long n);
void axpy(double a, const double* x, double* y, long n);

// Fixed left-to-right sum; the one reduction everything else funnels through.
double sum_ordered(const double* x, long n);

}  // namespace asgd::kernels
