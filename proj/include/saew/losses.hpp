#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <random>

#include "saew/core.hpp"

namespace saew {

double square_loss(ConstVectorView theta, ConstVectorView x, double y);
/// 2 x (x^T theta - y)
DenseVector square_grad(ConstVectorView theta, ConstVectorView x, double y);

/// rho(u) = u (alpha_q - [u < 0]) with u = y - x^T theta.
double pinball_loss(ConstVectorView theta, ConstVectorView x, double y, double alpha_q);
/// -x (alpha_q - [u < 0]); at the kink u = 0 the factor is alpha_q - 1.
DenseVector pinball_subgrad(ConstVectorView theta, ConstVectorView x, double y, double alpha_q);

double normal_cdf(double z);
double normal_pdf(double z);
double normal_quantile(double p);

/// E[rho_alpha(u)] for u ~ N(mean, sd^2).
double gaussian_pinball_risk(double mean, double sd, double alpha_q);

enum class Design { gaussian, truncated };

const char* to_string(Design design);

struct SquareEnvOptions {
  Design design = Design::gaussian;
  double clip = 3.0;        // |x_j| <= clip under the truncated design
  double noise_clip = 3.0;  // |noise| <= noise_clip * noise_sd under the truncated design
};

/// theta* with d0 nonzeros at uniformly random positions, values drawn from
/// N(0,1) and rescaled to unit l1 norm.
DenseVector make_sparse_target(std::size_t d, std::size_t d0, std::mt19937_64& rng);

/// Linear regression y = x^T theta* + noise with i.i.d. coordinates x_j.
///
/// Under the gaussian design x ~ N(0, I). Under the truncated design each
/// coordinate is a standard normal conditioned on |x_j| <= clip, so the
/// covariance is v I with v the truncated variance, and the noise is
/// truncated the same way. The excess risk is v ||theta - theta*||^2 in both
/// cases (v = 1 for the gaussian design).
class SquareEnvironment final : public Environment {
 public:
  SquareEnvironment(std::size_t d, std::size_t d0, double noise_sd, std::uint64_t seed,
                    SquareEnvOptions options = {});

  std::size_t dimension() const override { return theta_star_.size(); }
  LossFamily family() const override { return LossFamily::square; }

  Sample draw() override;
  double loss(ConstVectorView theta, const Sample& s) const override { return square_loss(theta, s.x, s.y); }
  DenseVector gradient(ConstVectorView theta, const Sample& s) const override {
    return square_grad(theta, s.x, s.y);
  }

  const DenseVector& theta_star() const override { return theta_star_; }
  RiskEstimate excess_risk(ConstVectorView theta) const override;

  /// E[(f(x) - x^T theta*)^2], the excess square risk of an arbitrary
  /// predictor, estimated on `n` fresh covariates from a stream fixed by `seed`.
  RiskEstimate predictor_excess_risk(const std::function<double(ConstVectorView)>& f, std::size_t n,
                                     std::uint64_t seed) const;

  double noise_sd() const { return noise_sd_; }
  const SquareEnvOptions& options() const { return options_; }
  /// lambda_min of the covariate covariance.
  double strong_convexity() const { return variance_; }
  /// Almost-sure bound on |x_j| (infinite for the gaussian design).
  double x_bound() const;
  /// Almost-sure bound on |y| (infinite for the gaussian design).
  double y_bound() const;
  /// Noise variance: the risk at theta*.
  double sigma2() const { return noise_var_; }

 private:
  double draw_coordinate(std::mt19937_64& rng) const;
  double draw_noise(std::mt19937_64& rng) const;

  double noise_sd_;
  SquareEnvOptions options_;
  double variance_ = 1.0;
  double noise_var_ = 0.0;
  DenseVector theta_star_;
  std::mt19937_64 rng_;
  std::uint64_t seed_;
};

/// Quantile regression with the pinball loss. Covariates are (1, z) with
/// z ~ N(0, I_d) and y = z^T beta + noise, noise ~ N(0, noise_sd^2); the
/// risk minimizer is (noise_sd * Phi^{-1}(alpha_q), beta).
class QuantileEnvironment final : public Environment {
 public:
  static constexpr std::size_t kHoldoutSize = 100000;

  QuantileEnvironment(std::size_t d, std::size_t d0, double alpha_q, double noise_sd, std::uint64_t seed,
                      std::size_t holdout_size = kHoldoutSize);

  std::size_t dimension() const override { return theta_star_.size(); }
  LossFamily family() const override { return LossFamily::quantile; }

  Sample draw() override;
  double loss(ConstVectorView theta, const Sample& s) const override {
    return pinball_loss(theta, s.x, s.y, alpha_q_);
  }
  DenseVector gradient(ConstVectorView theta, const Sample& s) const override {
    return pinball_subgrad(theta, s.x, s.y, alpha_q_);
  }

  const DenseVector& theta_star() const override { return theta_star_; }

  /// Paired Monte-Carlo estimate on the fixed holdout, with its standard error.
  RiskEstimate excess_risk(ConstVectorView theta) const override;

  /// Closed form: x^T theta - y is Gaussian given theta.
  double exact_excess_risk(ConstVectorView theta) const;

  /// Paired Monte-Carlo estimate on `n` fresh samples from a stream fixed by `seed`.
  RiskEstimate sampled_excess_risk(ConstVectorView theta, std::size_t n, std::uint64_t seed) const;

  double alpha_q() const { return alpha_q_; }
  double noise_sd() const { return noise_sd_; }
  double intercept_shift() const { return theta_star_[0]; }

 private:
  Sample sample_from(std::mt19937_64& rng) const;
  void build_holdout() const;

  double alpha_q_;
  double noise_sd_;
  DenseVector theta_star_;
  DenseVector beta_;  // data-generating slope, without the intercept
  std::mt19937_64 rng_;
  std::uint64_t seed_;
  std::size_t holdout_size_;

  // Built on first use; a flat row-major table of covariates and responses.
  mutable DenseVector holdout_x_;
  mutable DenseVector holdout_y_;
};

}  // namespace saew
