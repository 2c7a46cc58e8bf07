#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "saew/accelerator.hpp"
#include "saew/core.hpp"

namespace saew {

/// max(-Y, min(x, Y))
double clip(double x, double Y);

/// One tuning of the accelerated procedure. d0 == 0 is the null predictor,
/// which carries no (alpha, U, B).
struct GridEntry {
  std::size_t d0 = 0;
  double alpha = 0.0;
  double U = 0.0;
  double B = 0.0;

  bool is_null() const { return d0 == 0; }
  std::string describe() const;
};

struct HyperGrid {
  int j = 0;
  std::vector<GridEntry> entries;
};

/// Powers of two for doubling session j:
///   d0    in {0} u {2^k : k = 0..ceil(log2 d)}, clamped to d and deduplicated
///   U, B  in {2^k : k = -2j .. 2j + ceil(2 log2 Y)}
///   alpha in {2^k : k = -2j + ceil(log2(B d0 / Y^2)) .. j + ceil(log2 d0)}, per (d0, B)
HyperGrid build_grid(int j, std::size_t d, double Y);

/// |build_grid(j, d, Y)| without materializing it.
std::uint64_t grid_size(int j, std::size_t d, double Y);

/// Sparsity levels of the grid (without the null entry).
std::vector<std::size_t> grid_sparsity_levels(std::size_t d);

/// delta / (2 (j + 1)^2)
double calibration_delta(double delta, int j);

/// Online aggregation of scalar expert forecasts.
class Aggregator {
 public:
  virtual ~Aggregator() = default;
  virtual const DenseVector& weights() const = 0;
  virtual double predict(ConstVectorView forecasts) const = 0;
  virtual void update(ConstVectorView losses) = 0;
};

/// Exponential weights with a fixed learning rate, w_k ~ exp(-eta L_k) where
/// L_k is the cumulative loss of expert k.
class ExponentialWeights final : public Aggregator {
 public:
  ExponentialWeights(std::size_t n, double eta);

  const DenseVector& weights() const override { return weights_; }
  double predict(ConstVectorView forecasts) const override;
  void update(ConstVectorView losses) override;

  double learning_rate() const { return eta_; }
  const DenseVector& cumulative_losses() const { return cum_loss_; }

 private:
  double eta_;
  DenseVector cum_loss_;
  DenseVector weights_;
};

/// x -> sum_k w_k clip(x^T theta_k, Y)
struct MixturePredictor {
  std::vector<DenseVector> thetas;
  DenseVector weights;
  double Y = 1.0;

  double operator()(ConstVectorView x) const;
  bool empty() const { return thetas.empty(); }
};

/// Risk evaluators used to report each doubling session.
struct CalibrationMetrics {
  std::function<double(const DenseVector& theta)> linear_risk;  // risk of x -> clip(x^T theta, Y)
  std::function<double(const MixturePredictor& f)> mixture_risk;
};

struct SessionReport {
  int j = 0;
  std::size_t grid_size = 0;
  std::size_t best_candidate = 0;
  std::string best_description;
  double meta_risk = 0.0;  // risk of the session's averaged meta predictor
  double best_risk = 0.0;  // smallest risk among the session's candidates
};

/// Thrown when the requested run needs more candidate steps than allowed.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Candidate steps needed to process `horizon` samples: during doubling
/// session j every non-null entry of the next grid trains on each sample.
std::uint64_t required_candidate_steps(std::size_t d, double Y, std::int64_t horizon);

struct CalibrationOptions {
  double Y = 1.0;
  double delta = 0.05;
  std::int64_t horizon = 1;
  std::uint64_t budget = 100000000;  // cap on candidate steps
};

/// Parameter-free square-loss regression by doubling sessions.
///
/// Session j covers t in [2^j, 2^{j+1}). Its forecasts aggregate, with
/// exponential weights at rate 1/(8 Y^2), the clipped linear experts frozen
/// from the grid G_j, while every tuning in G_{j+1} trains a fresh accelerated
/// learner on the session's samples. The estimator output during session j
/// is the average meta forecaster of session j - 1.
class Calibrator {
 public:
  Calibrator(std::size_t d, CalibrationOptions options, SubroutineFactory factory = eg_factory());

  /// Meta forecast at x with the current weights.
  double predict(ConstVectorView x) const;

  /// Forecasts at s.x, then learns from (s.x, s.y). Returns the forecast.
  double step(const Sample& s);

  /// The estimator f-bar of the current session (zero during session 0).
  const MixturePredictor& estimator() const { return fbar_; }

  int session() const { return j_; }
  std::int64_t time() const { return t_; }  // index of the next sample
  const HyperGrid& grid() const { return grid_; }
  const std::vector<DenseVector>& experts() const { return experts_; }
  const Aggregator& aggregator() const { return *meta_; }
  std::uint64_t candidate_steps() const { return candidate_steps_; }
  std::uint64_t out_of_range_responses() const { return out_of_range_; }

  void set_metrics(CalibrationMetrics metrics) { metrics_ = std::move(metrics); }
  const std::vector<SessionReport>& reports() const { return reports_; }

  static void write_reports_csv(const std::vector<SessionReport>& reports, std::ostream& out);

 private:
  void start_session(int j, std::vector<DenseVector> experts);
  void start_training(int j_next);
  void finish_session();

  std::size_t d_;
  CalibrationOptions opt_;
  SubroutineFactory factory_;

  int j_ = 0;
  std::int64_t t_ = 1;
  HyperGrid grid_;
  std::vector<DenseVector> experts_;
  std::unique_ptr<Aggregator> meta_;
  DenseVector weight_sum_;
  std::int64_t session_steps_ = 0;
  DenseVector forecasts_;
  DenseVector losses_;

  HyperGrid next_grid_;
  std::vector<std::optional<Accelerator>> trainees_;

  MixturePredictor fbar_;
  std::uint64_t candidate_steps_ = 0;
  std::uint64_t out_of_range_ = 0;
  std::optional<CalibrationMetrics> metrics_;
  std::vector<SessionReport> reports_;
};

/// E[(clip(x^T theta, Y) - x^T theta*)^2] for x ~ N(0, I).
double clipped_linear_excess_risk(ConstVectorView theta, ConstVectorView theta_star, double Y);

}  // namespace saew
