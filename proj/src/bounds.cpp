#include "saew/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <spdlog/spdlog.h>

namespace saew {
namespace {

void require_delta(double delta, const char* what) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput(std::string(what) + ": delta must lie in (0,1)");
}

void require_horizon(std::int64_t T, const char* what) {
  if (T < 1) throw InvalidInput(std::string(what) + ": horizon must be >= 1");
}

// log(1 + 3 log T), T >= 1
double loglog_horizon(std::int64_t T) { return std::log1p(3.0 * std::log(static_cast<double>(T))); }

}  // namespace

double delta_i(double delta, std::int64_t i) {
  require_delta(delta, "delta_i");
  if (i < 1) throw InvalidInput("delta_i: index must be >= 1");
  const double k = static_cast<double>(i + 1);
  return delta / (k * k);
}

double loglog_window(std::int64_t window) {
  if (window < 1) throw InvalidInput("loglog_window: window must be >= 1");
  const double inner = std::max(0.0, std::log(static_cast<double>(window) / 2.0));
  return std::log1p(0.5 * inner);
}

double a_prime(double a, std::int64_t window, double delta_next) {
  require_delta(delta_next, "a_prime");
  const double radicand = loglog_window(window) - std::log(delta_next);
  if (!(radicand >= 0.0)) throw InvalidInput("a_prime: negative value under the square root");
  return a + std::numbers::sqrt2 * std::sqrt(radicand);
}

double b_prime(double b, std::int64_t window, double delta_next) {
  require_delta(delta_next, "b_prime");
  return b + 0.5 + loglog_window(window) - std::log(delta_next);
}

double err_bound(double grad_sq_sum, double a_p, double b_p, double B) {
  if (!(grad_sq_sum >= 0.0)) throw InvalidInput("err_bound: gradient square sum must be >= 0");
  if (!std::isfinite(grad_sq_sum) || !std::isfinite(a_p) || !std::isfinite(b_p) || !std::isfinite(B)) {
    throw InvalidInput("err_bound: non-finite input");
  }
  return a_p * std::sqrt(grad_sq_sum) + b_p * B;
}

double radius_bound(std::size_t d0, double U, int i, double alpha, std::int64_t window, double err) {
  if (window < 1) throw InvalidInput("radius_bound: window must be >= 1");
  if (!(alpha > 0.0) || !(U > 0.0)) throw InvalidInput("radius_bound: alpha and U must be > 0");
  if (err < 0.0) {
    spdlog::warn("radius_bound: negative error bound {} clipped to 0", err);
    err = 0.0;
  }
  const double scale = std::exp2(-0.5 * i);
  return 2.0 * std::sqrt(2.0 * static_cast<double>(d0) * U * scale * err / (alpha * static_cast<double>(window)));
}

ConfidenceSchedule::ConfidenceSchedule(double delta, RegretCertificate cert) : delta_(delta), cert_(cert) {
  require_delta(delta, "ConfidenceSchedule");
  if (!(cert.a >= 0.0) || !(cert.b >= 0.0) || !std::isfinite(cert.a) || !std::isfinite(cert.b)) {
    throw InvalidInput("ConfidenceSchedule: certificate constants must be finite and >= 0");
  }
}

double ConfidenceSchedule::session_a(int session, std::int64_t window) const {
  return a_prime(cert_.a, window, level(session + 1));
}

double ConfidenceSchedule::session_b(int session, std::int64_t window) const {
  return b_prime(cert_.b, window, level(session + 1));
}

AggregateConstants theorem1_constants(const RegretCertificate& cert, std::int64_t T, double delta) {
  require_horizon(T, "theorem1_constants");
  require_delta(delta, "theorem1_constants");
  const double ll = loglog_horizon(T);
  return {cert.a + std::sqrt(6.0 * ll - 2.0 * std::log(delta)), cert.b + 0.5 + 3.0 * ll - std::log(delta)};
}

double theorem1_slow_branch(const ProblemParams& p, const RegretCertificate& cert, std::int64_t T) {
  const auto [ap, bp] = theorem1_constants(cert, T, p.delta);
  const double t = static_cast<double>(T);
  const double d0 = static_cast<double>(p.d0);
  return p.U * p.B * (ap * std::sqrt(2.0 / t) + 4.0 * bp / t) + p.alpha * p.U * p.U / (8.0 * d0 * t);
}

double theorem1_fast_branch(const ProblemParams& p, const RegretCertificate& cert, std::int64_t T) {
  const auto [ap, bp] = theorem1_constants(cert, T, p.delta);
  const double t = static_cast<double>(T);
  const double d0 = static_cast<double>(p.d0);
  return (d0 * p.B * p.B / p.alpha) * (128.0 * ap * ap / t + 2048.0 * bp * bp / (t * t)) +
         2.0 * p.alpha * p.U * p.U / (d0 * t * t);
}

double theorem1_bound(const ProblemParams& p, const RegretCertificate& cert, std::int64_t T) {
  if (p.d0 < 1) throw InvalidInput("theorem1_bound: d0 must be >= 1");
  return std::min(theorem1_slow_branch(p, cert, T), theorem1_fast_branch(p, cert, T));
}

double theorem2_bound(const ProblemParams& p, const RegretCertificate& cert, std::int64_t T) {
  if (p.d0 < 1) throw InvalidInput("theorem2_bound: d0 must be >= 1");
  const auto [ap, bp] = theorem1_constants(cert, T, p.delta);
  const double t = static_cast<double>(T);
  const double d0 = static_cast<double>(p.d0);
  const double slow = 4.0 * p.U * p.B * (ap * std::sqrt(t) + bp + 1.0);
  const double fast = (32.0 * d0 * p.B * p.B / p.alpha) * ap * ap * std::log2(t) + 4.0 * p.U * p.B * (1.0 + bp) +
                      p.alpha * p.U * p.U / (8.0 * d0);
  return std::min(slow, fast);
}

SquareLossConstants theorem3_constants(const RegretCertificate& cert, std::int64_t T, double delta) {
  require_horizon(T, "theorem3_constants");
  if (!(delta > 0.0)) throw InvalidInput("theorem3_constants: delta must be > 0");
  const double ll = loglog_horizon(T);
  const double l2d = std::log(2.0 / delta);
  return {2.0 * cert.a + 2.0 * std::sqrt(6.0 * ll + 2.0 * l2d),
          1.0 + 3.0 * cert.b + 4.0 * cert.a * cert.a + 9.0 * ll + 3.0 * l2d};
}

SquareLossBound theorem3_bound(double X, double Y, double U, std::size_t d0, double alpha, double sigma,
                               const RegretCertificate& cert, std::int64_t T, double delta) {
  require_delta(delta, "theorem3_bound");
  if (d0 < 1 || !(X > 0.0) || !(Y > 0.0) || !(U > 0.0) || !(alpha > 0.0) || !(sigma >= 0.0)) {
    throw InvalidInput("theorem3_bound: parameters out of range");
  }
  const auto [ap, cp] = theorem3_constants(cert, T, delta);
  const double t = static_cast<double>(T);
  const double k = static_cast<double>(d0);
  const double range = Y + X * U;
  SquareLossBound out;
  out.slow_branch = U * X * (sigma * ap / std::sqrt(t) + range * cp / t) + alpha * U * U / (k * t);
  out.fast_branch = (X * X * k / alpha) * (sigma * sigma * ap * ap / t + range * range * cp * cp / (t * t)) +
                    alpha * U * U / (k * t * t);
  out.value = std::min(out.slow_branch, out.fast_branch);
  return out;
}

double gradient_bound_square(double X, double Y, double U) { return 2.0 * X * (Y + 2.0 * X * U); }

double session_gamma(std::size_t d0, double B, double alpha, double U) {
  return 16.0 * static_cast<double>(d0) * B / (alpha * U);
}

double session_length_bound(double gamma, double a_p, double b_p, int j) {
  if (j < 0) throw InvalidInput("session_length_bound: j must be >= 0");
  return 1.0 + std::exp2(j) * gamma * gamma * a_p * a_p + std::exp2(0.5 * j) * gamma * b_p;
}

double lemma3_min_radius(double U, double gamma, double a_p, double b_p, std::int64_t t) {
  require_horizon(t, "lemma3_min_radius");
  const double tt = static_cast<double>(t);
  return U * (std::numbers::sqrt2 * gamma * a_p / std::sqrt(tt) + (2.0 + 4.0 * gamma * b_p) / tt);
}

double poisson_bound(double sum_conditional_means, double B, double delta) {
  require_delta(delta, "poisson_bound");
  if (!(B > 0.0)) throw InvalidInput("poisson_bound: B must be > 0");
  return (std::numbers::e - 1.0) * sum_conditional_means + B * std::log(1.0 / delta);
}

double regret_to_risk_bound(double epsilon, double B, double grad_sq_sum, std::int64_t T, double delta) {
  require_horizon(T, "regret_to_risk_bound");
  require_delta(delta, "regret_to_risk_bound");
  if (!(grad_sq_sum >= 0.0)) throw InvalidInput("regret_to_risk_bound: gradient square sum must be >= 0");
  const double half_log = std::max(0.0, std::log(static_cast<double>(T) / 2.0));
  const double martingale = std::sqrt(2.0 * std::log((2.0 + half_log) / (2.0 * delta)) * grad_sq_sum);
  return epsilon * martingale + (0.5 + std::log1p(0.5 * half_log) - std::log(delta)) * epsilon * B;
}

double RiskConversionParams::eta(double epsilon, double B) const {
  const double cap = 1.0 / B;
  if (v <= 0.0) return cap / epsilon;
  return std::min(cap, c * gamma_factor / v) / epsilon;
}

RiskConversionParams make_risk_conversion_params(std::int64_t T, double delta, double grad_sq_sum) {
  require_horizon(T, "make_risk_conversion_params");
  require_delta(delta, "make_risk_conversion_params");
  RiskConversionParams p;
  const double inner = std::max(0.0, std::log(std::sqrt(static_cast<double>(T)) / p.c));
  p.gamma_factor = std::sqrt(std::log1p(inner) - std::log(delta));
  p.v = std::sqrt(std::max(0.0, grad_sq_sum));
  return p;
}

}  // namespace saew
