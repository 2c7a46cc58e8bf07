#include "saew/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

namespace saew {
namespace {

enum Stream : std::uint64_t { kTargetStream = 1, kSampleStream = 2, kHoldoutStream = 3 };

double residual(ConstVectorView theta, ConstVectorView x, double y, const char* what) {
  require_same_dimension(theta, x, what);
  return y - dot(x, theta);
}

double truncated_variance(double c) {
  return 1.0 - 2.0 * c * normal_pdf(c) / (2.0 * normal_cdf(c) - 1.0);
}

double truncated_normal(std::mt19937_64& rng, double clip) {
  std::normal_distribution<double> n01;
  for (;;) {
    const double z = n01(rng);
    if (std::abs(z) <= clip) return z;
  }
}

RiskEstimate mean_and_se(double sum, double sum_sq, std::size_t n) {
  const double m = sum / static_cast<double>(n);
  double var = 0.0;
  if (n > 1) var = std::max(0.0, (sum_sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1));
  return {m, std::sqrt(var / static_cast<double>(n))};
}

}  // namespace

double square_loss(ConstVectorView theta, ConstVectorView x, double y) {
  const double u = residual(theta, x, y, "square_loss");
  return u * u;
}

DenseVector square_grad(ConstVectorView theta, ConstVectorView x, double y) {
  const double r = -residual(theta, x, y, "square_grad");
  DenseVector g(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) g[j] = 2.0 * x[j] * r;
  return g;
}

double pinball_loss(ConstVectorView theta, ConstVectorView x, double y, double alpha_q) {
  if (!(alpha_q > 0.0 && alpha_q < 1.0)) throw InvalidInput("pinball_loss: alpha_q must lie in (0,1)");
  const double u = residual(theta, x, y, "pinball_loss");
  return u * (alpha_q - (u < 0.0 ? 1.0 : 0.0));
}

DenseVector pinball_subgrad(ConstVectorView theta, ConstVectorView x, double y, double alpha_q) {
  if (!(alpha_q > 0.0 && alpha_q < 1.0)) throw InvalidInput("pinball_subgrad: alpha_q must lie in (0,1)");
  const double u = residual(theta, x, y, "pinball_subgrad");
  const double factor = u > 0.0 ? alpha_q : alpha_q - 1.0;
  DenseVector g(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) g[j] = -x[j] * factor;
  return g;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidInput("normal_quantile: p must lie in (0,1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double gaussian_pinball_risk(double mean, double sd, double alpha_q) {
  if (sd <= 0.0) return mean * (alpha_q - (mean < 0.0 ? 1.0 : 0.0));
  // E[u 1{u<0}] = mean Phi(-mean/sd) - sd phi(mean/sd)
  const double z = mean / sd;
  return alpha_q * mean - (mean * normal_cdf(-z) - sd * normal_pdf(z));
}

const char* to_string(Design design) { return design == Design::gaussian ? "gaussian" : "truncated"; }

DenseVector make_sparse_target(std::size_t d, std::size_t d0, std::mt19937_64& rng) {
  if (d0 < 1 || d0 > d) throw InvalidInput("make_sparse_target: need 1 <= d0 <= d");
  std::vector<std::size_t> idx(d);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  // Partial Fisher-Yates: the first d0 slots are a uniform d0-subset.
  for (std::size_t k = 0; k < d0; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, d - 1);
    std::swap(idx[k], idx[pick(rng)]);
  }
  std::normal_distribution<double> n01;
  DenseVector theta(d, 0.0);
  double norm = 0.0;
  for (std::size_t k = 0; k < d0; ++k) {
    double v = 0.0;
    while (v == 0.0) v = n01(rng);
    theta[idx[k]] = v;
    norm += std::abs(v);
  }
  for (double& v : theta) v /= norm;
  return theta;
}

SquareEnvironment::SquareEnvironment(std::size_t d, std::size_t d0, double noise_sd, std::uint64_t seed,
                                     SquareEnvOptions options)
    : noise_sd_(noise_sd), options_(options), rng_(make_engine(seed, kSampleStream, 0)), seed_(seed) {
  if (d < 1) throw InvalidInput("SquareEnvironment: d must be >= 1");
  if (d0 > d) throw InvalidInput("SquareEnvironment: d0 exceeds d");
  if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) throw InvalidInput("SquareEnvironment: noise_sd must be >= 0");
  if (options_.design == Design::truncated) {
    if (!(options_.clip > 0.0) || !(options_.noise_clip > 0.0)) {
      throw InvalidInput("SquareEnvironment: truncation levels must be > 0");
    }
    variance_ = truncated_variance(options_.clip);
    noise_var_ = noise_sd * noise_sd * truncated_variance(options_.noise_clip);
  } else {
    noise_var_ = noise_sd * noise_sd;
  }
  auto target_rng = make_engine(seed, kTargetStream, 0);
  theta_star_ = make_sparse_target(d, d0, target_rng);
}

double SquareEnvironment::draw_coordinate(std::mt19937_64& rng) const {
  if (options_.design == Design::truncated) return truncated_normal(rng, options_.clip);
  std::normal_distribution<double> n01;
  return n01(rng);
}

double SquareEnvironment::draw_noise(std::mt19937_64& rng) const {
  if (noise_sd_ == 0.0) return 0.0;
  if (options_.design == Design::truncated) return noise_sd_ * truncated_normal(rng, options_.noise_clip);
  std::normal_distribution<double> n01;
  return noise_sd_ * n01(rng);
}

Sample SquareEnvironment::draw() {
  Sample s;
  s.x.resize(theta_star_.size());
  for (double& v : s.x) v = draw_coordinate(rng_);
  s.y = dot(s.x, theta_star_) + draw_noise(rng_);
  return s;
}

RiskEstimate SquareEnvironment::excess_risk(ConstVectorView theta) const {
  const double e = excess_l2(theta, theta_star_);
  return {variance_ * e * e, 0.0};
}

RiskEstimate SquareEnvironment::predictor_excess_risk(const std::function<double(ConstVectorView)>& f,
                                                      std::size_t n, std::uint64_t seed) const {
  if (n < 1) throw InvalidInput("predictor_excess_risk: n must be >= 1");
  auto rng = make_engine(seed_, kHoldoutStream, seed);
  DenseVector x(theta_star_.size());
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    for (double& v : x) v = draw_coordinate(rng);
    const double diff = f(x) - dot(x, theta_star_);
    sum += diff * diff;
    sum_sq += diff * diff * diff * diff;
  }
  return mean_and_se(sum, sum_sq, n);
}

double SquareEnvironment::x_bound() const {
  return options_.design == Design::truncated ? options_.clip : std::numeric_limits<double>::infinity();
}

double SquareEnvironment::y_bound() const {
  if (options_.design != Design::truncated) return std::numeric_limits<double>::infinity();
  return options_.clip * l1_norm(theta_star_) + options_.noise_clip * noise_sd_;
}

QuantileEnvironment::QuantileEnvironment(std::size_t d, std::size_t d0, double alpha_q, double noise_sd,
                                         std::uint64_t seed, std::size_t holdout_size)
    : alpha_q_(alpha_q),
      noise_sd_(noise_sd),
      rng_(make_engine(seed, kSampleStream, 0)),
      seed_(seed),
      holdout_size_(holdout_size) {
  if (d < 1) throw InvalidInput("QuantileEnvironment: d must be >= 1");
  if (d0 > d) throw InvalidInput("QuantileEnvironment: d0 exceeds d");
  if (!(alpha_q > 0.0 && alpha_q < 1.0)) throw InvalidInput("QuantileEnvironment: alpha_q must lie in (0,1)");
  if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) throw InvalidInput("QuantileEnvironment: noise_sd must be >= 0");
  auto target_rng = make_engine(seed, kTargetStream, 0);
  beta_ = make_sparse_target(d, d0, target_rng);
  theta_star_.assign(d + 1, 0.0);
  theta_star_[0] = noise_sd > 0.0 ? noise_sd * normal_quantile(alpha_q) : 0.0;
  std::copy(beta_.begin(), beta_.end(), theta_star_.begin() + 1);
}

Sample QuantileEnvironment::sample_from(std::mt19937_64& rng) const {
  std::normal_distribution<double> n01;
  Sample s;
  s.x.resize(theta_star_.size());
  s.x[0] = 1.0;
  double y = 0.0;
  for (std::size_t j = 0; j < beta_.size(); ++j) {
    s.x[j + 1] = n01(rng);
    y += s.x[j + 1] * beta_[j];
  }
  s.y = y + (noise_sd_ > 0.0 ? noise_sd_ * n01(rng) : 0.0);
  return s;
}

Sample QuantileEnvironment::draw() { return sample_from(rng_); }

void QuantileEnvironment::build_holdout() const {
  if (!holdout_y_.empty() || holdout_size_ == 0) return;
  auto rng = make_engine(seed_, kHoldoutStream, 0);
  const std::size_t p = theta_star_.size();
  holdout_x_.resize(holdout_size_ * p);
  holdout_y_.resize(holdout_size_);
  for (std::size_t k = 0; k < holdout_size_; ++k) {
    Sample s = sample_from(rng);
    std::copy(s.x.begin(), s.x.end(), holdout_x_.begin() + static_cast<std::ptrdiff_t>(k * p));
    holdout_y_[k] = s.y;
  }
}

RiskEstimate QuantileEnvironment::excess_risk(ConstVectorView theta) const {
  require_same_dimension(theta, theta_star_, "QuantileEnvironment::excess_risk");
  if (holdout_size_ == 0) throw InvalidInput("QuantileEnvironment: no holdout configured");
  build_holdout();
  const std::size_t p = theta_star_.size();
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t k = 0; k < holdout_size_; ++k) {
    ConstVectorView x(holdout_x_.data() + k * p, p);
    const double diff = pinball_loss(theta, x, holdout_y_[k], alpha_q_) -
                        pinball_loss(theta_star_, x, holdout_y_[k], alpha_q_);
    sum += diff;
    sum_sq += diff * diff;
  }
  return mean_and_se(sum, sum_sq, holdout_size_);
}

RiskEstimate QuantileEnvironment::sampled_excess_risk(ConstVectorView theta, std::size_t n,
                                                      std::uint64_t seed) const {
  require_same_dimension(theta, theta_star_, "QuantileEnvironment::sampled_excess_risk");
  if (n < 1) throw InvalidInput("sampled_excess_risk: n must be >= 1");
  auto rng = make_engine(seed_, kHoldoutStream, seed + 1);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Sample s = sample_from(rng);
    const double diff = pinball_loss(theta, s.x, s.y, alpha_q_) - pinball_loss(theta_star_, s.x, s.y, alpha_q_);
    sum += diff;
    sum_sq += diff * diff;
  }
  return mean_and_se(sum, sum_sq, n);
}

double QuantileEnvironment::exact_excess_risk(ConstVectorView theta) const {
  require_same_dimension(theta, theta_star_, "QuantileEnvironment::exact_excess_risk");
  require_finite(theta, "QuantileEnvironment::exact_excess_risk");
  // y - x^T theta = noise - theta_0 - z^T (theta_z - beta) ~ N(-theta_0, noise_sd^2 + ||theta_z - beta||^2)
  double dist_sq = 0.0;
  for (std::size_t j = 0; j < beta_.size(); ++j) {
    const double diff = theta[j + 1] - beta_[j];
    dist_sq += diff * diff;
  }
  const double sd = std::sqrt(noise_sd_ * noise_sd_ + dist_sq);
  const double at_theta = gaussian_pinball_risk(-theta[0], sd, alpha_q_);
  const double at_star = gaussian_pinball_risk(-theta_star_[0], noise_sd_, alpha_q_);
  return std::max(0.0, at_theta - at_star);
}

}  // namespace saew
