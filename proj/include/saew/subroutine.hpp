#pragma once

#include <cstdint>
#include <functional>
#include <memory>

#include <json.hpp>

#include "saew/core.hpp"

namespace saew {

/// Online convex optimization confined to an l1 ball.
///
/// Implementations predict a point of `ball()`, then consume the gradient of
/// the loss at that point. Their regret against any point of the ball must
/// stay below ball().radius * (a sqrt(sum ||g_t||_inf^2) + b B) where
/// (a, b) = certificate().
class Subroutine {
 public:
  virtual ~Subroutine() = default;

  virtual const L1Ball& ball() const = 0;
  virtual const DenseVector& predict() const = 0;
  virtual void update(ConstVectorView gradient) = 0;
  virtual RegretCertificate certificate() const = 0;

  virtual nlohmann::json to_json() const = 0;
  virtual std::unique_ptr<Subroutine> clone() const = 0;
};

using SubroutineFactory = std::function<std::unique_ptr<Subroutine>(L1Ball ball, double B)>;

/// (a, b) = (2 sqrt(2 ln 2d), 2 + 2 ln 2d).
RegretCertificate eg_certificate(std::size_t d);

/// Convex combination of the 2d corners center +/- radius e_j.
/// Weights are ordered (1+, ..., d+, 1-, ..., d-).
DenseVector combine_corners(const L1Ball& ball, ConstVectorView weights);

/// Exponentiated gradient over the corners of an l1 ball.
///
/// Losses are linearized, so corner j+/- accumulates +/- radius * S_j with
/// S the running gradient sum. Weights are exp(-eta_t * loss) computed in
/// log space, with the adaptive rate
///   eta_t = min{ 1 / (radius * B_hat), sqrt(ln 2d) / (radius * V_t) },
/// V_t^2 = sum_{s<=t} ||g_s||_inf^2 and B_hat = max(B, largest sup-norm seen).
class ExponentiatedGradient final : public Subroutine {
 public:
  ExponentiatedGradient(L1Ball ball, double B);

  const L1Ball& ball() const override { return ball_; }
  const DenseVector& predict() const override { return prediction_; }
  void update(ConstVectorView gradient) override;
  RegretCertificate certificate() const override { return eg_certificate(ball_.dimension()); }

  nlohmann::json to_json() const override;
  static ExponentiatedGradient from_json(const nlohmann::json& j);
  std::unique_ptr<Subroutine> clone() const override { return std::make_unique<ExponentiatedGradient>(*this); }

  /// Simplex over the 2d corners, ordered as in combine_corners.
  DenseVector weights() const;

  double declared_bound() const { return B_; }
  double grad_sq_sum() const { return v2_; }
  double learning_rate() const { return eta_; }
  std::uint64_t steps() const { return steps_; }
  std::uint64_t bound_violations() const { return violations_; }

 private:
  void refresh();

  L1Ball ball_;
  double B_;
  double b_hat_;
  DenseVector grad_sum_;
  double v2_ = 0.0;
  double eta_ = 0.0;
  std::uint64_t steps_ = 0;
  std::uint64_t violations_ = 0;
  DenseVector prediction_;
};

SubroutineFactory eg_factory();

/// Rebuilds a subroutine from its to_json() document.
std::unique_ptr<Subroutine> subroutine_from_json(const nlohmann::json& j);

}  // namespace saew
