#include "saew/baselines.hpp"

#include <cmath>

namespace saew {

DualAveraging::DualAveraging(std::size_t d, RdaParams params)
    : params_(params), g_sum_(d, 0.0), g_bar_(d, 0.0), theta_(d, 0.0) {
  if (d < 1) throw InvalidInput("DualAveraging: d must be >= 1");
  if (!(params.gamma > 0.0) || !std::isfinite(params.gamma)) throw InvalidInput("DualAveraging: gamma must be > 0");
  if (!(params.rho >= 0.0) || !std::isfinite(params.rho)) throw InvalidInput("DualAveraging: rho must be >= 0");
  if (!(params.lambda >= 0.0) || !std::isfinite(params.lambda)) {
    throw InvalidInput("DualAveraging: lambda must be >= 0");
  }
}

double DualAveraging::threshold() const {
  if (t_ == 0) return params_.lambda;
  return params_.lambda + params_.gamma * params_.rho / std::sqrt(static_cast<double>(t_));
}

void DualAveraging::update(ConstVectorView gradient) {
  require_same_dimension(gradient, theta_, "DualAveraging::update");
  require_finite(gradient, "DualAveraging::update gradient");
  ++t_;
  const double t = static_cast<double>(t_);
  const double lambda_t = threshold();
  const double scale = std::sqrt(t) / params_.gamma;
  for (std::size_t j = 0; j < theta_.size(); ++j) {
    g_sum_[j] += gradient[j];
    // Mean from the exact sum so it never drifts.
    g_bar_[j] = g_sum_[j] / t;
    const double g = g_bar_[j];
    if (std::abs(g) <= lambda_t) {
      theta_[j] = 0.0;
    } else {
      theta_[j] = -scale * (g - lambda_t * (g > 0.0 ? 1.0 : -1.0));
    }
  }
}

}  // namespace saew
