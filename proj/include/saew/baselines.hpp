#pragma once

#include <cstdint>

#include "saew/core.hpp"

namespace saew {

struct RdaParams {
  double gamma = 1.0;   // step-size scale, > 0
  double rho = 0.0;     // extra shrinkage that fades as 1/sqrt(t)
  double lambda = 0.0;  // l1 weight
};

/// l1-regularized dual averaging.
///
/// Keeps the mean g of all gradients seen so far. After t gradients the
/// threshold is lambda_t = lambda + gamma rho / sqrt(t) and coordinate j is
///   0                                       if |g_j| <= lambda_t
///   -(sqrt(t) / gamma) (g_j - lambda_t sign(g_j))   otherwise.
class DualAveraging {
 public:
  DualAveraging(std::size_t d, RdaParams params);

  const DenseVector& predict() const { return theta_; }
  void update(ConstVectorView gradient);

  const DenseVector& mean_gradient() const { return g_bar_; }
  std::int64_t steps() const { return t_; }
  const RdaParams& params() const { return params_; }
  double threshold() const;

 private:
  RdaParams params_;
  std::int64_t t_ = 0;
  DenseVector g_sum_;
  DenseVector g_bar_;
  DenseVector theta_;
};

}  // namespace saew
