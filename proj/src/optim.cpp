#include "asgd/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace asgd {

namespace {
constexpr double kPi = 3.141592653589793238462643383279;

void check_same_size(const std::vector<double>& a, const std::vector<double>& b,
                     const char* what) {
  if (a.size() != b.size()) throw std::invalid_argument(std::string(what) + ": shape mismatch");
}
}  // namespace

void LrScheduleSpec::validate() const {
  if (eta_min <= 0.0) throw std::invalid_argument("LrScheduleSpec: eta_min must be > 0");
  if (eta_min >= eta_max)
    throw std::invalid_argument("LrScheduleSpec: eta_min must be < eta_max");
  if (t_warmup < 0) throw std::invalid_argument("LrScheduleSpec: t_warmup must be >= 0");
  if (total_steps < 1) throw std::invalid_argument("LrScheduleSpec: total_steps must be >= 1");
}

double lr_at(const LrScheduleSpec& spec, long t) {
  if (t < spec.t_warmup) return static_cast<double>(t) * spec.eta_max / spec.t_warmup;
  const long denom = spec.total_steps - spec.t_warmup;
  double ratio = denom > 0 ? static_cast<double>(t - spec.t_warmup) / denom : 1.0;
  ratio = std::min(std::max(ratio, 0.0), 1.0);
  return spec.eta_min + 0.5 * (spec.eta_max - spec.eta_min) * (1.0 + std::cos(ratio * kPi));
}

void sgd_step(std::vector<double>& params, const std::vector<double>& grad, double lr) {
  check_same_size(params, grad, "sgd_step");
  if (lr < 0.0) throw std::invalid_argument("sgd_step: lr must be >= 0");
  for (size_t i = 0; i < params.size(); ++i) params[i] -= lr * grad[i];
}

void AdamWState::step(std::vector<double>& params, const std::vector<double>& grad,
                      double lr) {
  check_same_size(params, grad, "AdamW");
  if (m.empty()) {
    m.assign(params.size(), 0.0);
    v.assign(params.size(), 0.0);
  }
  check_same_size(params, m, "AdamW state");
  ++t;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  for (size_t i = 0; i < params.size(); ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
    const double m_hat = m[i] / bc1;
    const double v_hat = v[i] / bc2;
    params[i] -= lr * (m_hat / (std::sqrt(v_hat) + eps) + weight_decay * params[i]);
  }
}

void OuterSgd::step(std::vector<double>& params, const std::vector<double>& g,
                    double eps_lr) {
  check_same_size(params, g, "OuterSgd");
  for (size_t i = 0; i < params.size(); ++i) params[i] -= eps_lr * g[i];
}

void OuterMomentum::step(std::vector<double>& params, const std::vector<double>& g,
                         double eps_lr) {
  check_same_size(params, g, "OuterMomentum");
  if (m.empty()) m.assign(params.size(), 0.0);
  for (size_t i = 0; i < params.size(); ++i) {
    m[i] = beta * m[i] + g[i];
    params[i] -= eps_lr * m[i];
  }
}

void OuterNesterov::step(std::vector<double>& params, const std::vector<double>& g,
                         double eps_lr) {
  check_same_size(params, g, "OuterNesterov");
  if (m.empty()) m.assign(params.size(), 0.0);
  for (size_t i = 0; i < params.size(); ++i) {
    m[i] = beta * m[i] + g[i];
    params[i] -= eps_lr * (beta * m[i] + g[i]);
  }
}

void OuterAdam::step(std::vector<double>& params, const std::vector<double>& g,
                     double eps_lr) {
  check_same_size(params, g, "OuterAdam");
  if (m.empty()) {
    m.assign(params.size(), 0.0);
    v.assign(params.size(), 0.0);
  }
  ++t;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  for (size_t i = 0; i < params.size(); ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
    params[i] -= eps_lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps_adam);
  }
}

void DelayedNesterov::validate() const {
  if (n < 1) throw std::invalid_argument("DelayedNesterov: N must be >= 1");
  if (c < 0.0 || c > 1.0 / n)
    throw std::invalid_argument("DelayedNesterov: c must lie in [0, 1/N]");
  if (beta <= 0.0 || beta >= 1.0)
    throw std::invalid_argument("DelayedNesterov: beta must lie in (0, 1)");
}

void DelayedNesterov::step(std::vector<double>& params, const std::vector<double>& g,
                           double eps_lr) {
  validate();
  check_same_size(params, g, "DelayedNesterov");
  if (m.empty()) m.assign(params.size(), 0.0);
  if (buffer.empty()) buffer.assign(params.size(), 0.0);

  for (size_t i = 0; i < params.size(); ++i) buffer[i] += g[i];
  if ((t + 1) % n == 0) {
    const double momentum_gain = 1.0 - c * n + c;
    for (size_t i = 0; i < params.size(); ++i) {
      m[i] = beta * m[i] + buffer[i] / n;
      params[i] -= eps_lr * (momentum_gain * beta * m[i] + g[i] / n);
      buffer[i] = 0.0;
    }
  } else {
    for (size_t i = 0; i < params.size(); ++i)
      params[i] -= eps_lr * (c * beta * m[i] + g[i] / n);
  }
  ++t;
}

PseudoGradient poly_discount(PseudoGradient g, double exponent) {
  const double factor = std::pow(1.0 + static_cast<double>(g.staleness), -exponent);
  for (double& d : g.delta) d *= factor;
  return g;
}

std::optional<PseudoGradient> staleness_filter(PseudoGradient g, int threshold) {
  if (threshold >= 0 && g.staleness > threshold) return std::nullopt;
  return g;
}

PseudoGradient delay_compensate(PseudoGradient g,
                                const std::vector<double>& theta_now,
                                const std::vector<double>& theta_base,
                                double lambda) {
  check_same_size(theta_now, theta_base, "delay_compensate");
  check_same_size(g.delta, theta_now, "delay_compensate");
  for (size_t i = 0; i < g.delta.size(); ++i)
    g.delta[i] += lambda * g.delta[i] * g.delta[i] * (theta_now[i] - theta_base[i]);
  return g;
}

std::optional<std::vector<double>> GradientBuffer::push(std::vector<double> delta) {
  if (capacity < 1) throw std::invalid_argument("GradientBuffer: capacity must be >= 1");
  items.push_back(std::move(delta));
  if (static_cast<int>(items.size()) < capacity) return std::nullopt;
  std::vector<double> mean(items.front().size(), 0.0);
  for (const auto& item : items) {
    check_same_size(mean, item, "GradientBuffer");
    for (size_t i = 0; i < mean.size(); ++i) mean[i] += item[i];
  }
  for (double& x : mean) x /= items.size();
  items.clear();
  return mean;
}

SequentialNesterovClosedForm sequential_nesterov_closed_form(
    const std::vector<double>& m0, const std::vector<double>& g, double beta,
    int k) {
  if (k != 4)
    throw std::invalid_argument("sequential_nesterov_closed_form: only k = 4 is supported");
  check_same_size(m0, g, "sequential_nesterov_closed_form");
  const double b2 = beta * beta, b3 = b2 * beta, b4 = b3 * beta;
  const double geom = 1.0 + beta + b2 + b3;
  const double g_coeff = 4.0 + 4.0 * beta + 3.0 * b2 + 2.0 * b3 + b4;
  SequentialNesterovClosedForm out;
  out.m_final.resize(g.size());
  out.total_step_over_eps.resize(g.size());
  for (size_t i = 0; i < g.size(); ++i) {
    out.m_final[i] = b4 * m0[i] + geom * g[i];
    out.total_step_over_eps[i] = g_coeff * g[i] + b2 * geom * m0[i];
  }
  return out;
}

}  // namespace asgd
