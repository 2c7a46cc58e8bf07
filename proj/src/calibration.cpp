#include "saew/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <spdlog/spdlog.h>

#include "saew/losses.hpp"

namespace saew {
namespace {

// ceil that ignores round-off just above an integer
int ceil_int(double x) { return static_cast<int>(std::ceil(x - 1e-9)); }

struct Range {
  int lo = 0;
  int hi = -1;
  int count() const { return hi >= lo ? hi - lo + 1 : 0; }
};

Range radius_range(int j, double Y) { return {-2 * j, 2 * j + ceil_int(2.0 * std::log2(Y))}; }

Range alpha_range(int j, std::size_t d0, int log2_B, double Y) {
  const double l2d0 = std::log2(static_cast<double>(d0));
  return {-2 * j + ceil_int(log2_B + l2d0 - 2.0 * std::log2(Y)), j + ceil_int(l2d0)};
}

void require_grid_args(int j, std::size_t d, double Y) {
  if (j < 0) throw InvalidInput("build_grid: j must be >= 0");
  if (d < 1) throw InvalidInput("build_grid: d must be >= 1");
  if (!(Y > 0.0) || !std::isfinite(Y)) throw InvalidInput("build_grid: Y must be > 0");
}

}  // namespace

double clip(double x, double Y) {
  if (!(Y > 0.0)) throw InvalidInput("clip: Y must be > 0");
  return std::max(-Y, std::min(x, Y));
}

std::string GridEntry::describe() const {
  if (is_null()) return "d0=0";
  return "d0=" + std::to_string(d0) + " alpha=" + format_double(alpha) + " U=" + format_double(U) +
         " B=" + format_double(B);
}

std::vector<std::size_t> grid_sparsity_levels(std::size_t d) {
  std::vector<std::size_t> out;
  const int kmax = ceil_int(std::log2(static_cast<double>(d)));
  for (int k = 0; k <= kmax; ++k) {
    const std::size_t v = std::min<std::size_t>(std::size_t{1} << k, d);
    if (out.empty() || out.back() != v) out.push_back(v);
  }
  return out;
}

HyperGrid build_grid(int j, std::size_t d, double Y) {
  require_grid_args(j, d, Y);
  HyperGrid g;
  g.j = j;
  g.entries.push_back(GridEntry{});
  const Range r = radius_range(j, Y);
  for (std::size_t d0 : grid_sparsity_levels(d)) {
    for (int ku = r.lo; ku <= r.hi; ++ku) {
      for (int kb = r.lo; kb <= r.hi; ++kb) {
        const Range a = alpha_range(j, d0, kb, Y);
        for (int ka = a.lo; ka <= a.hi; ++ka) {
          g.entries.push_back(GridEntry{d0, std::ldexp(1.0, ka), std::ldexp(1.0, ku), std::ldexp(1.0, kb)});
        }
      }
    }
  }
  return g;
}

std::uint64_t grid_size(int j, std::size_t d, double Y) {
  require_grid_args(j, d, Y);
  std::uint64_t n = 1;
  const Range r = radius_range(j, Y);
  for (std::size_t d0 : grid_sparsity_levels(d)) {
    for (int kb = r.lo; kb <= r.hi; ++kb) {
      n += static_cast<std::uint64_t>(r.count()) * static_cast<std::uint64_t>(alpha_range(j, d0, kb, Y).count());
    }
  }
  return n;
}

double calibration_delta(double delta, int j) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("calibration_delta: delta must lie in (0,1)");
  if (j < 0) throw InvalidInput("calibration_delta: j must be >= 0");
  const double k = static_cast<double>(j + 1);
  return delta / (2.0 * k * k);
}

ExponentialWeights::ExponentialWeights(std::size_t n, double eta)
    : eta_(eta), cum_loss_(n, 0.0), weights_(n, n ? 1.0 / static_cast<double>(n) : 0.0) {
  if (n < 1) throw InvalidInput("ExponentialWeights: need at least one expert");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidInput("ExponentialWeights: eta must be > 0");
}

double ExponentialWeights::predict(ConstVectorView forecasts) const {
  require_same_dimension(forecasts, weights_, "ExponentialWeights::predict");
  return dot(weights_, forecasts);
}

void ExponentialWeights::update(ConstVectorView losses) {
  require_same_dimension(losses, weights_, "ExponentialWeights::update");
  require_finite(losses, "ExponentialWeights::update losses");
  for (std::size_t k = 0; k < losses.size(); ++k) cum_loss_[k] += losses[k];
  const double best = *std::min_element(cum_loss_.begin(), cum_loss_.end());
  double z = 0.0;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    weights_[k] = std::exp(-eta_ * (cum_loss_[k] - best));
    z += weights_[k];
  }
  for (double& w : weights_) w /= z;
}

double MixturePredictor::operator()(ConstVectorView x) const {
  double s = 0.0;
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    if (weights[k] == 0.0) continue;
    s += weights[k] * clip(dot(x, thetas[k]), Y);
  }
  return s;
}

std::uint64_t required_candidate_steps(std::size_t d, double Y, std::int64_t horizon) {
  if (horizon < 1) throw InvalidInput("required_candidate_steps: horizon must be >= 1");
  std::uint64_t total = 0;
  for (int j = 0; (std::int64_t{1} << (j + 1)) <= horizon; ++j) {
    const std::int64_t start = std::int64_t{1} << j;
    const std::int64_t samples = std::min<std::int64_t>(start, horizon - start + 1);
    total += (grid_size(j + 1, d, Y) - 1) * static_cast<std::uint64_t>(samples);
  }
  return total;
}

Calibrator::Calibrator(std::size_t d, CalibrationOptions options, SubroutineFactory factory)
    : d_(d), opt_(options), factory_(std::move(factory)) {
  if (d < 1) throw InvalidInput("Calibrator: d must be >= 1");
  if (!(opt_.Y > 0.0) || !std::isfinite(opt_.Y)) throw InvalidInput("Calibrator: Y must be > 0");
  if (!(opt_.delta > 0.0 && opt_.delta < 1.0)) throw InvalidInput("Calibrator: delta must lie in (0,1)");
  if (opt_.horizon < 1) throw InvalidInput("Calibrator: horizon must be >= 1");
  const std::uint64_t need = required_candidate_steps(d, opt_.Y, opt_.horizon);
  if (need > opt_.budget) {
    throw BudgetExceeded("calibration needs " + std::to_string(need) + " candidate steps for horizon " +
                         std::to_string(opt_.horizon) + ", budget is " + std::to_string(opt_.budget));
  }
  fbar_.Y = opt_.Y;
  HyperGrid g0 = build_grid(0, d_, opt_.Y);
  std::vector<DenseVector> untrained(g0.entries.size(), DenseVector(d_, 0.0));
  grid_ = std::move(g0);
  start_session(0, std::move(untrained));
}

void Calibrator::start_session(int j, std::vector<DenseVector> experts) {
  j_ = j;
  experts_ = std::move(experts);
  meta_ = std::make_unique<ExponentialWeights>(experts_.size(), 1.0 / (8.0 * opt_.Y * opt_.Y));
  weight_sum_.assign(experts_.size(), 0.0);
  forecasts_.assign(experts_.size(), 0.0);
  losses_.assign(experts_.size(), 0.0);
  session_steps_ = 0;
  start_training(j + 1);
}

void Calibrator::start_training(int j_next) {
  trainees_.clear();
  next_grid_ = HyperGrid{};
  next_grid_.j = j_next;
  // Untrained experts would never be used past the horizon.
  if ((std::int64_t{1} << j_next) > opt_.horizon) return;
  next_grid_ = build_grid(j_next, d_, opt_.Y);
  const double delta_j = calibration_delta(opt_.delta, j_next);
  trainees_.reserve(next_grid_.entries.size());
  for (const auto& e : next_grid_.entries) {
    if (e.is_null()) {
      trainees_.emplace_back(std::nullopt);
    } else {
      trainees_.emplace_back(Accelerator(ProblemParams{e.d0, e.alpha, e.U, e.B, delta_j}, d_, factory_));
    }
  }
}

double Calibrator::predict(ConstVectorView x) const {
  require_same_dimension(x, experts_.front(), "Calibrator::predict");
  double s = 0.0;
  const auto& w = meta_->weights();
  for (std::size_t k = 0; k < experts_.size(); ++k) s += w[k] * clip(dot(x, experts_[k]), opt_.Y);
  return s;
}

double Calibrator::step(const Sample& s) {
  require_same_dimension(s.x, experts_.front(), "Calibrator::step");
  require_finite(s.x, "Calibrator::step x");
  if (!std::isfinite(s.y)) throw InvalidInput("Calibrator::step: non-finite response");
  if (std::abs(s.y) > opt_.Y) {
    if (out_of_range_ == 0) spdlog::warn("calibration: response {} outside the clipping range {}", s.y, opt_.Y);
    ++out_of_range_;
  }

  for (std::size_t k = 0; k < experts_.size(); ++k) forecasts_[k] = clip(dot(s.x, experts_[k]), opt_.Y);
  const auto& w = meta_->weights();
  const double forecast = meta_->predict(forecasts_);
  for (std::size_t k = 0; k < w.size(); ++k) weight_sum_[k] += w[k];
  for (std::size_t k = 0; k < forecasts_.size(); ++k) {
    const double r = forecasts_[k] - s.y;
    losses_[k] = r * r;
  }
  meta_->update(losses_);

  for (auto& learner : trainees_) {
    if (!learner) continue;
    learner->observe(square_grad(learner->next_prediction(), s.x, s.y));
    ++candidate_steps_;
  }

  ++session_steps_;
  ++t_;
  if (t_ == (std::int64_t{1} << (j_ + 1))) finish_session();
  return forecast;
}

void Calibrator::finish_session() {
  MixturePredictor avg;
  avg.Y = opt_.Y;
  avg.thetas = experts_;
  avg.weights = weight_sum_;
  for (double& w : avg.weights) w /= static_cast<double>(session_steps_);

  if (metrics_) {
    SessionReport rep;
    rep.j = j_;
    rep.grid_size = grid_.entries.size();
    rep.best_risk = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < experts_.size(); ++k) {
      const double r = metrics_->linear_risk(experts_[k]);
      if (r < rep.best_risk) {
        rep.best_risk = r;
        rep.best_candidate = k;
      }
    }
    rep.best_description = grid_.entries[rep.best_candidate].describe();
    rep.meta_risk = metrics_->mixture_risk(avg);
    reports_.push_back(std::move(rep));
  }
  fbar_ = std::move(avg);

  std::vector<DenseVector> next_experts;
  next_experts.reserve(trainees_.size());
  for (auto& learner : trainees_) {
    next_experts.push_back(learner ? learner->theta_tilde() : DenseVector(d_, 0.0));
  }
  if (next_experts.empty()) {
    // Past the horizon: keep going with the last experts.
    next_grid_ = grid_;
    next_experts = experts_;
    next_grid_.j = j_ + 1;
  }
  grid_ = std::move(next_grid_);
  start_session(j_ + 1, std::move(next_experts));
}

void Calibrator::write_reports_csv(const std::vector<SessionReport>& reports, std::ostream& out) {
  out << "j,grid_size,best_candidate,meta_risk,best_risk\n";
  for (const auto& r : reports) {
    out << r.j << ',' << r.grid_size << ',' << r.best_candidate << ',' << format_double(r.meta_risk) << ','
        << format_double(r.best_risk) << '\n';
  }
}

double clipped_linear_excess_risk(ConstVectorView theta, ConstVectorView theta_star, double Y) {
  require_same_dimension(theta, theta_star, "clipped_linear_excess_risk");
  if (!(Y > 0.0)) throw InvalidInput("clipped_linear_excess_risk: Y must be > 0");
  const double s2 = dot(theta, theta);
  const double v2 = dot(theta_star, theta_star);
  if (s2 == 0.0) return v2;
  const double s = std::sqrt(s2);
  const double c = Y / s;
  const double inside = 2.0 * normal_cdf(c) - 1.0 - 2.0 * c * normal_pdf(c);  // E[u^2 1{|u|<=Y}] / s^2
  const double clip_sq = s2 * inside + 2.0 * Y * Y * (1.0 - normal_cdf(c));
  const double clip_u = s2 * inside + 2.0 * Y * s * normal_pdf(c);
  const double cov = dot(theta, theta_star);
  return std::max(0.0, clip_sq - 2.0 * (cov / s2) * clip_u + v2);
}

}  // namespace saew
