#pragma once

// Closed-form constants and bound evaluators for the accelerated procedure.
//
// Every function here is a deterministic pure function. Logarithms are
// natural unless the name says log2. Where a log(window / 2) term would go
// negative (window = 1), it is clipped at 0.

#include <cstdint>
#include <string>

#include "saew/core.hpp"

namespace saew {

/// delta / (i + 1)^2, i >= 1. Sums to at most delta over i >= 1.
double delta_i(double delta, std::int64_t i);

/// log(1 + log(window / 2) / 2) with the inner log clipped at 0.
double loglog_window(std::int64_t window);

/// a + sqrt(2) * sqrt(loglog_window(window) - log(delta_next))
double a_prime(double a, std::int64_t window, double delta_next);

/// b + 1/2 + loglog_window(window) - log(delta_next)
double b_prime(double b, std::int64_t window, double delta_next);

/// a_p * sqrt(grad_sq_sum) + b_p * B
double err_bound(double grad_sq_sum, double a_p, double b_p, double B);

/// 2 * sqrt(2 * d0 * U * 2^(-i/2) * err / (alpha * window)); negative err is
/// clipped to 0.
double radius_bound(std::size_t d0, double U, int i, double alpha, std::int64_t window, double err);

/// Per-session confidence levels delta_{i+1} = delta / (i + 2)^2 and the
/// inflated certificate constants a_i', b_i' derived from them.
class ConfidenceSchedule {
 public:
  ConfidenceSchedule(double delta, RegretCertificate cert);

  double delta() const { return delta_; }
  const RegretCertificate& certificate() const { return cert_; }

  /// delta_j for j >= 1.
  double level(std::int64_t j) const { return delta_i(delta_, j); }

  /// Constants used by session i (which consumes delta_{i+1}).
  double session_a(int session, std::int64_t window) const;
  double session_b(int session, std::int64_t window) const;

 private:
  double delta_;
  RegretCertificate cert_;
};

/// Aggregated a', b' that hold uniformly over the first T steps.
struct AggregateConstants {
  double a_prime = 0.0;
  double b_prime = 0.0;
};

AggregateConstants theorem1_constants(const RegretCertificate& cert, std::int64_t T, double delta);

/// High-probability bound on the instantaneous excess risk of the frozen
/// estimator after T steps: min of the slow-rate and fast-rate branches.
double theorem1_bound(const ProblemParams& p, const RegretCertificate& cert, std::int64_t T);
double theorem1_slow_branch(const ProblemParams& p, const RegretCertificate& cert, std::int64_t T);
double theorem1_fast_branch(const ProblemParams& p, const RegretCertificate& cert, std::int64_t T);

/// High-probability bound on the cumulative excess risk of the predictions.
double theorem2_bound(const ProblemParams& p, const RegretCertificate& cert, std::int64_t T);

struct SquareLossConstants {
  double a_prime = 0.0;
  double c_prime = 0.0;
};

/// a' = 2a + 2 sqrt(6 log(1 + 3 log T) + 2 log(2/delta)),
/// c' = 1 + 3b + 4a^2 + 9 log(1 + 3 log T) + 3 log(2/delta). Accepts any delta > 0.
SquareLossConstants theorem3_constants(const RegretCertificate& cert, std::int64_t T, double delta);

struct SquareLossBound {
  double value = 0.0;
  double slow_branch = 0.0;
  double fast_branch = 0.0;
  // The statement only holds up to a universal multiplicative constant.
  static constexpr const char* qualifier = "up to a universal constant";
};

SquareLossBound theorem3_bound(double X, double Y, double U, std::size_t d0, double alpha, double sigma,
                               const RegretCertificate& cert, std::int64_t T, double delta);

/// 2X(Y + 2XU): sup-norm gradient bound of the square loss over the 2U ball.
double gradient_bound_square(double X, double Y, double U);

/// 2^4 d0 B / (alpha U)
double session_gamma(std::size_t d0, double B, double alpha, double U);

/// 1 + 2^j gamma^2 a'^2 + 2^(j/2) gamma b'
double session_length_bound(double gamma, double a_p, double b_p, int j);

/// U (sqrt(2) gamma a' / sqrt(t) + (2 + 4 gamma b') / t)
double lemma3_min_radius(double U, double gamma, double a_p, double b_p, std::int64_t t);

/// (e - 1) * sum_conditional_means + B log(1/delta), for increments in [0, B].
double poisson_bound(double sum_conditional_means, double B, double delta);

/// Cumulative risk minus cumulative regret of any procedure in an l1 ball
/// of radius epsilon, with probability 1 - delta.
double regret_to_risk_bound(double epsilon, double B, double grad_sq_sum, std::int64_t T, double delta);

/// Tuning used to derive regret_to_risk_bound: the learning rates
///   eta_t = (1/epsilon) min{1/B, c Gamma / V_{t-1}},  c = sqrt(2).
struct RiskConversionParams {
  double gamma_factor = 0.0;  // sqrt(log(1 + log(sqrt(T)/c)) - log delta), inner log clipped at 0
  double v = 0.0;             // sqrt of the gradient sup-norm squared sum
  double c = 1.4142135623730951;

  double eta(double epsilon, double B) const;
};

RiskConversionParams make_risk_conversion_params(std::int64_t T, double delta, double grad_sq_sum);

}  // namespace saew
