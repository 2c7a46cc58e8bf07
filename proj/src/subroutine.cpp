#include "saew/subroutine.hpp"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

namespace saew {

RegretCertificate eg_certificate(std::size_t d) {
  if (d < 1) throw InvalidInput("eg_certificate: d must be >= 1");
  const double l = std::log(2.0 * static_cast<double>(d));
  return {2.0 * std::sqrt(2.0 * l), 2.0 + 2.0 * l};
}

DenseVector combine_corners(const L1Ball& ball, ConstVectorView weights) {
  const std::size_t d = ball.dimension();
  if (weights.size() != 2 * d) throw InvalidInput("combine_corners: expected 2d weights");
  DenseVector out = ball.center;
  for (std::size_t j = 0; j < d; ++j) out[j] += ball.radius * (weights[j] - weights[d + j]);
  return out;
}

ExponentiatedGradient::ExponentiatedGradient(L1Ball ball, double B)
    : ball_(std::move(ball)), B_(B), b_hat_(B), grad_sum_(ball_.dimension(), 0.0), prediction_(ball_.center) {
  if (!(B > 0.0) || !std::isfinite(B)) throw InvalidInput("ExponentiatedGradient: B must be > 0");
  if (ball_.dimension() < 1) throw InvalidInput("ExponentiatedGradient: empty dimension");
  refresh();
}

void ExponentiatedGradient::update(ConstVectorView gradient) {
  require_same_dimension(gradient, ball_.center, "ExponentiatedGradient::update");
  require_finite(gradient, "ExponentiatedGradient::update gradient");
  const double sup = linf_norm(gradient);
  if (sup > B_) {
    if (violations_ == 0) {
      spdlog::debug("exponentiated gradient: gradient sup-norm {} exceeds the declared bound {}", sup, B_);
    }
    ++violations_;
  }
  b_hat_ = std::max(b_hat_, sup);
  for (std::size_t j = 0; j < gradient.size(); ++j) grad_sum_[j] += gradient[j];
  v2_ += sup * sup;
  ++steps_;
  refresh();
}

void ExponentiatedGradient::refresh() {
  const double r = ball_.radius;
  if (r == 0.0) {
    eta_ = 0.0;
    prediction_ = ball_.center;
    return;
  }
  const double log2d = std::log(2.0 * static_cast<double>(ball_.dimension()));
  eta_ = 1.0 / (r * b_hat_);
  if (v2_ > 0.0) eta_ = std::min(eta_, std::sqrt(log2d) / (r * std::sqrt(v2_)));

  // Corner j+/- has log-weight -/+ eta r S_j; shift by the largest.
  const double scale = eta_ * r;
  double shift = 0.0;
  for (double s : grad_sum_) shift = std::max(shift, scale * std::abs(s));
  double z = 0.0;
  const std::size_t d = grad_sum_.size();
  prediction_.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double x = scale * grad_sum_[j];
    const double wp = std::exp(-x - shift);
    const double wm = std::exp(x - shift);
    z += wp + wm;
    prediction_[j] = wp - wm;
  }
  for (std::size_t j = 0; j < d; ++j) prediction_[j] = ball_.center[j] + r * prediction_[j] / z;
}

DenseVector ExponentiatedGradient::weights() const {
  const std::size_t d = grad_sum_.size();
  DenseVector w(2 * d, 1.0 / static_cast<double>(2 * d));
  if (ball_.radius == 0.0) return w;
  const double scale = eta_ * ball_.radius;
  double shift = 0.0;
  for (double s : grad_sum_) shift = std::max(shift, scale * std::abs(s));
  double z = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    w[j] = std::exp(-scale * grad_sum_[j] - shift);
    w[d + j] = std::exp(scale * grad_sum_[j] - shift);
    z += w[j] + w[d + j];
  }
  for (double& x : w) x /= z;
  return w;
}

nlohmann::json ExponentiatedGradient::to_json() const {
  return {{"type", "exponentiated_gradient"},
          {"center", ball_.center},
          {"radius", ball_.radius},
          {"B", B_},
          {"B_hat", b_hat_},
          {"grad_sum", grad_sum_},
          {"grad_sq_sum", v2_},
          {"steps", steps_},
          {"violations", violations_}};
}

ExponentiatedGradient ExponentiatedGradient::from_json(const nlohmann::json& j) {
  ExponentiatedGradient eg(L1Ball(j.at("center").get<DenseVector>(), j.at("radius").get<double>()),
                           j.at("B").get<double>());
  eg.b_hat_ = j.at("B_hat").get<double>();
  eg.grad_sum_ = j.at("grad_sum").get<DenseVector>();
  eg.v2_ = j.at("grad_sq_sum").get<double>();
  eg.steps_ = j.at("steps").get<std::uint64_t>();
  eg.violations_ = j.at("violations").get<std::uint64_t>();
  if (eg.grad_sum_.size() != eg.ball_.dimension()) throw InvalidInput("ExponentiatedGradient: bad snapshot");
  eg.refresh();
  return eg;
}

SubroutineFactory eg_factory() {
  return [](L1Ball ball, double B) { return std::make_unique<ExponentiatedGradient>(std::move(ball), B); };
}

std::unique_ptr<Subroutine> subroutine_from_json(const nlohmann::json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "exponentiated_gradient") {
    return std::make_unique<ExponentiatedGradient>(ExponentiatedGradient::from_json(j));
  }
  throw InvalidInput("unknown subroutine type: " + type);
}

}  // namespace saew
