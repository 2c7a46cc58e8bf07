#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <json.hpp>

#include "saew/bounds.hpp"
#include "saew/core.hpp"
#include "saew/subroutine.hpp"

namespace saew {

/// Keeps the d0 largest-magnitude coordinates of v and zeroes the rest.
/// Ties are broken toward the lower index.
DenseVector truncate_top(ConstVectorView v, std::size_t d0);

/// What one step observed and derived.
struct StepInfo {
  std::int64_t t = 0;       // global time of the step
  int session = 0;          // session the step belonged to
  std::int64_t window = 0;  // t - t_i + 1
  double grad_sup = 0.0;
  double grad_sq_sum = 0.0;  // session sum of squared sup-norms
  double a_prime = 0.0;
  double b_prime = 0.0;
  double err = 0.0;
  double epsilon = 0.0;
  int sessions_closed = 0;  // sessions closed right after this step
};

struct SessionRecord {
  int index = 0;
  std::int64_t start = 0;  // t_i
  std::int64_t end = 0;    // t_{i+1}; the session covered [start, end - 1]
  double radius = 0.0;
  DenseVector center;      // truncated average the session was centered on
  DenseVector average;     // the session's average at its last step (the center's for empty sessions)
  double a_prime_end = 0.0;
  double b_prime_end = 0.0;
  double max_grad_sup = 0.0;
  double epsilon_end = 0.0;  // epsilon_{t_{i+1} - 1}
  double epsilon_before_end = 0.0;  // epsilon_{t_{i+1} - 2}, when the session had >= 2 steps

  std::int64_t length() const { return end - start; }
};

struct Estimators {
  DenseVector theta_hat;    // the next prediction
  DenseVector theta_tilde;  // the average frozen at the smallest epsilon so far
};

/// Restarted subroutine sessions in shrinking l1 balls.
///
/// Session i runs a fresh subroutine on the ball of radius U 2^{-i/2}
/// centered at the hard-truncated average of the previous session. After
/// each step the confidence radius
///   eps_t = 2 sqrt(2 d0 U 2^{-i/2} Err_t / (alpha (t - t_i + 1)))
/// is updated and the session closes once eps_t <= U 2^{-(i+1)/2}.
/// Sessions may be empty when the last radius already clears the next
/// threshold.
class Accelerator {
 public:
  Accelerator(ProblemParams params, std::size_t d, SubroutineFactory factory = eg_factory());

  Accelerator(const Accelerator& other);
  Accelerator& operator=(const Accelerator& other);
  Accelerator(Accelerator&&) noexcept = default;
  Accelerator& operator=(Accelerator&&) noexcept = default;

  /// Predicts with the active subroutine, queries the oracle there and
  /// updates every estimator. Closes sessions as the radius allows.
  StepInfo step(const GradientOracle& oracle);

  /// Same as step() for callers that already hold the gradient at
  /// `next_prediction()`.
  StepInfo observe(ConstVectorView gradient);

  const DenseVector& next_prediction() const { return sub_->predict(); }
  Estimators estimators() const;

  const ProblemParams& params() const { return params_; }
  std::size_t dimension() const { return d_; }
  const ConfidenceSchedule& schedule() const { return schedule_; }

  int session() const { return session_; }
  std::int64_t session_start() const { return session_start_; }
  std::int64_t time() const { return t_; }  // time of the next step
  std::int64_t steps_taken() const { return t_ - 1; }
  double epsilon() const { return eps_; }
  double epsilon_min() const { return eps_min_; }
  std::int64_t epsilon_argmin() const { return eps_argmin_; }
  double session_radius() const { return sub_->ball().radius; }
  const DenseVector& session_center() const { return sub_->ball().center; }
  const DenseVector& theta_bar() const { return theta_bar_; }
  const DenseVector& theta_tilde() const { return theta_tilde_; }
  const Subroutine& subroutine() const { return *sub_; }
  double max_grad_sup() const { return max_grad_sup_; }

  /// Completed sessions, in order.
  const std::vector<SessionRecord>& sessions() const { return history_; }

  static constexpr int kSnapshotVersion = 1;
  nlohmann::json snapshot() const;
  static Accelerator restore(const nlohmann::json& doc, SubroutineFactory factory = eg_factory());

  /// Steps between full recomputations of the running average.
  static constexpr std::int64_t kRecomputeEvery = 1024;

 private:
  void open_session(DenseVector center);
  void close_sessions();

  ProblemParams params_;
  std::size_t d_;
  SubroutineFactory factory_;
  ConfidenceSchedule schedule_;
  std::unique_ptr<Subroutine> sub_;

  int session_ = 0;
  std::int64_t session_start_ = 1;
  std::int64_t t_ = 1;
  double grad_sq_sum_ = 0.0;
  double session_max_grad_ = 0.0;
  double max_grad_sup_ = 0.0;
  double a_last_ = 0.0;
  double b_last_ = 0.0;
  double eps_ = 0.0;
  double eps_prev_ = 0.0;
  double eps_min_ = 0.0;
  std::int64_t eps_argmin_ = 0;

  DenseVector theta_bar_;
  DenseVector pred_sum_;  // compensated running sum of the session predictions
  DenseVector pred_sum_c_;
  DenseVector theta_tilde_;
  std::vector<SessionRecord> history_;
};

}  // namespace saew
