// Times the serial reference kernels against their OpenMP counterparts and
// verifies the two produce bit-identical outputs.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "asgd/kernels.hpp"
#include "asgd/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using asgd::Rng;
namespace kernels = asgd::kernels;

double seconds_per_call(const std::function<void()>& fn, int reps) {
  fn();  // warm up
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count() / reps;
}

std::vector<double> random_vec(Rng& rng, long n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

void report(const std::string& name, double serial_s, double parallel_s, bool match) {
  std::printf("%-24s serial %9.3f us   openmp %9.3f us   speedup %5.2fx   bitwise match: %s\n",
              name.c_str(), serial_s * 1e6, parallel_s * 1e6, serial_s / parallel_s,
              match ? "yes" : "NO");
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; parallel variants fall back to serial\n");
#endif

  const int rows = 256, in_dim = 512, out_dim = 512, classes = 64;
  const int reps = 20;
  Rng rng(42);

  const auto x = random_vec(rng, static_cast<long>(rows) * in_dim);
  const auto w = random_vec(rng, static_cast<long>(in_dim) * out_dim);
  const auto b = random_vec(rng, out_dim);
  const auto dy = random_vec(rng, static_cast<long>(rows) * out_dim);

  {
    std::vector<double> y1(static_cast<long>(rows) * out_dim), y2 = y1;
    const double ts = seconds_per_call(
        [&] { kernels::linear_forward_serial(x.data(), w.data(), b.data(), y1.data(), rows, in_dim, out_dim); }, reps);
    const double tp = seconds_per_call(
        [&] { kernels::linear_forward_parallel(x.data(), w.data(), b.data(), y2.data(), rows, in_dim, out_dim); }, reps);
    report("linear_forward", ts, tp, bitwise_equal(y1, y2));
  }
  {
    std::vector<double> dx1(static_cast<long>(rows) * in_dim), dx2 = dx1;
    const double ts = seconds_per_call(
        [&] { kernels::linear_backward_data_serial(dy.data(), w.data(), dx1.data(), rows, in_dim, out_dim); }, reps);
    const double tp = seconds_per_call(
        [&] { kernels::linear_backward_data_parallel(dy.data(), w.data(), dx2.data(), rows, in_dim, out_dim); }, reps);
    report("linear_backward_data", ts, tp, bitwise_equal(dx1, dx2));
  }
  {
    std::vector<double> dw1(static_cast<long>(in_dim) * out_dim), dw2 = dw1;
    std::vector<double> db1(out_dim), db2(out_dim);
    const double ts = seconds_per_call(
        [&] { kernels::linear_backward_params_serial(x.data(), dy.data(), dw1.data(), db1.data(), rows, in_dim, out_dim); }, reps);
    const double tp = seconds_per_call(
        [&] { kernels::linear_backward_params_parallel(x.data(), dy.data(), dw2.data(), db2.data(), rows, in_dim, out_dim); }, reps);
    report("linear_backward_params", ts, tp, bitwise_equal(dw1, dw2) && bitwise_equal(db1, db2));
  }
  {
    const long n = static_cast<long>(rows) * in_dim * 8;
    const auto z = random_vec(rng, n);
    std::vector<double> a1(n), a2(n);
    const double ts = seconds_per_call([&] { kernels::relu_forward_serial(z.data(), a1.data(), n); }, reps);
    const double tp = seconds_per_call([&] { kernels::relu_forward_parallel(z.data(), a2.data(), n); }, reps);
    report("relu_forward", ts, tp, bitwise_equal(a1, a2));
  }
  {
    const int xrows = rows * 16;
    const auto logits = random_vec(rng, static_cast<long>(xrows) * classes);
    std::vector<int> labels(xrows);
    for (int i = 0; i < xrows; ++i) labels[i] = static_cast<int>(rng.below(classes));
    std::vector<double> loss1(xrows), loss2(xrows);
    std::vector<double> dz1(static_cast<long>(xrows) * classes), dz2 = dz1;
    const double ts = seconds_per_call(
        [&] { kernels::softmax_xent_serial(logits.data(), labels.data(), loss1.data(), dz1.data(), 1.0 / xrows, xrows, classes); }, reps);
    const double tp = seconds_per_call(
        [&] { kernels::softmax_xent_parallel(logits.data(), labels.data(), loss2.data(), dz2.data(), 1.0 / xrows, xrows, classes); }, reps);
    report("softmax_xent", ts, tp, bitwise_equal(loss1, loss2) && bitwise_equal(dz1, dz2));
  }
  return 0;
}
