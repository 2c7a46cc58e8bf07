#include "saew/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "saew/accelerator.hpp"
#include "saew/baselines.hpp"
#include "saew/bounds.hpp"
#include "saew/losses.hpp"
#include "saew/subroutine.hpp"

namespace saew {
namespace {

namespace fs = std::filesystem;

enum Component : std::uint64_t { kEnvironmentComponent = 1, kMetricComponent = 2 };

// Excess risk of a parameter vector as the harness reports it.
class RiskMeter {
 public:
  RiskMeter(const ExperimentConfig& c, const Environment& env) : env_(env) {
    if (c.loss == LossFamily::quantile && c.risk_eval == RiskEval::exact) {
      quantile_ = dynamic_cast<const QuantileEnvironment*>(&env);
    }
  }

  RiskEstimate operator()(ConstVectorView theta) const {
    if (quantile_) return {quantile_->exact_excess_risk(theta), 0.0};
    return env_.excess_risk(theta);
  }

 private:
  const Environment& env_;
  const QuantileEnvironment* quantile_ = nullptr;
};

nlohmann::json environment_json(const ExperimentConfig& c, const Environment& env, std::uint64_t env_seed) {
  return {{"loss", to_string(c.loss)},
          {"d", c.d},
          {"d0", c.d0},
          {"noise_sd", c.noise_sd},
          {"alpha_q", c.alpha_q},
          {"design", to_string(c.design)},
          {"seed", env_seed},
          {"theta_star", env.theta_star()}};
}

void run_accelerated(const ExperimentConfig& c, Environment& env, SeedRun& run) {
  const std::size_t p = env.dimension();
  const ProblemParams params{c.effective_saew_d0(), c.alpha, c.U, c.B, c.delta};
  Accelerator acc(params, p);
  const RiskMeter risk(c, env);
  const auto& star = env.theta_star();
  const double bound_scale = 1.0 / (2.0 * std::sqrt(2.0 * static_cast<double>(params.d0)));

  double cum = 0.0;
  for (std::int64_t t = 1; t <= c.T; ++t) {
    const Sample s = env.draw();
    const DenseVector played = acc.next_prediction();
    const RiskEstimate r_hat = risk(played);
    const StepInfo info = acc.observe(env.gradient(played, s));
    const RiskEstimate r_tilde = risk(acc.theta_tilde());
    cum += r_hat.value;

    RunRow row;
    row.t = t;
    row.l2_error = excess_l2(acc.theta_tilde(), star);
    row.risk_hat = r_hat.value;
    row.risk_tilde = r_tilde.value;
    row.cum_risk = cum;
    row.epsilon = info.epsilon;
    row.session = info.session;
    row.risk_se = r_tilde.se;
    if (c.trace_bounds) {
      const auto& sessions = acc.sessions();
      const DenseVector& bar = info.sessions_closed > 0
                                   ? sessions[sessions.size() - static_cast<std::size_t>(info.sessions_closed)].average
                                   : acc.theta_bar();
      row.l2_bar = excess_l2(bar, star);
      row.l2_bound = info.epsilon * bound_scale;
      row.err = info.err;
      row.a_prime = info.a_prime;
      row.b_prime = info.b_prime;
    }
    run.record.append(row);
  }

  // Session diagnostics: induction event, session-length law.
  const double gamma = session_gamma(params.d0, params.B, params.alpha, params.U);
  nlohmann::json sessions = nlohmann::json::array();
  bool induction = l1_norm(star) <= params.U + kBallTolerance;
  bool lengths_ok = true;
  for (const auto& s : acc.sessions()) {
    const double center_error = [&] {
      DenseVector diff(p);
      for (std::size_t j = 0; j < p; ++j) diff[j] = s.center[j] - star[j];
      return l1_norm(diff);
    }();
    const double length_bound =
        s.length() > 0 ? session_length_bound(gamma, s.a_prime_end, s.b_prime_end, s.index) : 1.0;
    lengths_ok = lengths_ok && static_cast<double>(s.length()) <= length_bound;
    sessions.push_back({{"index", s.index},
                        {"start", s.start},
                        {"end", s.end},
                        {"length", s.length()},
                        {"radius", s.radius},
                        {"center_l1_error", center_error},
                        {"a_prime_end", s.a_prime_end},
                        {"b_prime_end", s.b_prime_end},
                        {"max_grad_sup", s.max_grad_sup},
                        {"epsilon_end", s.epsilon_end},
                        {"length_bound", length_bound}});
  }
  // Every center opened so far, the active session's included.
  std::vector<std::int64_t> starts{1};
  for (const auto& s : acc.sessions()) starts.push_back(s.end);
  const auto& sess = acc.sessions();
  for (std::size_t k = 0; k < sess.size(); ++k) {
    const DenseVector& center = k + 1 < sess.size() ? sess[k + 1].center : acc.session_center();
    const double radius = params.U * std::exp2(-0.5 * static_cast<double>(sess[k].index + 1));
    induction = induction && ball_contains(L1Ball(center, radius), star);
  }

  run.metadata["algorithm_state"] = {{"params",
                                      {{"d0", params.d0},
                                       {"alpha", params.alpha},
                                       {"U", params.U},
                                       {"B", params.B},
                                       {"delta", params.delta}}},
                                     {"certificate", {{"a", acc.schedule().certificate().a},
                                                      {"b", acc.schedule().certificate().b}}},
                                     {"session_starts", starts},
                                     {"sessions", sessions},
                                     {"active_session", acc.session()},
                                     {"epsilon_min", acc.epsilon_min()},
                                     {"epsilon_argmin", acc.epsilon_argmin()},
                                     {"max_grad_sup", acc.max_grad_sup()},
                                     {"gradients_within_B", acc.max_grad_sup() <= params.B},
                                     {"induction_held", induction},
                                     {"session_lengths_within_bound", lengths_ok},
                                     {"gamma", gamma},
                                     {"theta_tilde", acc.theta_tilde()}};
}

void run_subroutine(const ExperimentConfig& c, Environment& env, SeedRun& run) {
  const std::size_t p = env.dimension();
  ExponentiatedGradient eg(L1Ball(DenseVector(p, 0.0), c.U), c.B);
  const RiskMeter risk(c, env);
  const auto& star = env.theta_star();
  DenseVector avg(p, 0.0);
  double cum = 0.0;
  for (std::int64_t t = 1; t <= c.T; ++t) {
    const Sample s = env.draw();
    const DenseVector played = eg.predict();
    const RiskEstimate r_hat = risk(played);
    for (std::size_t j = 0; j < p; ++j) avg[j] += (played[j] - avg[j]) / static_cast<double>(t);
    eg.update(env.gradient(played, s));
    const RiskEstimate r_avg = risk(avg);
    cum += r_hat.value;
    RunRow row;
    row.t = t;
    row.l2_error = excess_l2(avg, star);
    row.risk_hat = r_hat.value;
    row.risk_tilde = r_avg.value;
    row.cum_risk = cum;
    row.risk_se = r_avg.se;
    run.record.append(row);
  }
  run.metadata["algorithm_state"] = {{"U", c.U},
                                     {"B", c.B},
                                     {"certificate", {{"a", eg.certificate().a}, {"b", eg.certificate().b}}},
                                     {"bound_violations", eg.bound_violations()},
                                     {"average", avg}};
}

void run_dual_averaging(const ExperimentConfig& c, Environment& env, SeedRun& run) {
  const std::size_t p = env.dimension();
  DualAveraging rda(p, RdaParams{c.gamma, c.rho, c.lambda});
  const RiskMeter risk(c, env);
  const auto& star = env.theta_star();
  double cum = 0.0;
  for (std::int64_t t = 1; t <= c.T; ++t) {
    const Sample s = env.draw();
    const DenseVector played = rda.predict();
    const RiskEstimate r_hat = risk(played);
    rda.update(env.gradient(played, s));
    const RiskEstimate r_next = risk(rda.predict());
    cum += r_hat.value;
    RunRow row;
    row.t = t;
    row.l2_error = excess_l2(rda.predict(), star);
    row.risk_hat = r_hat.value;
    row.risk_tilde = r_next.value;
    row.cum_risk = cum;
    row.risk_se = r_next.se;
    run.record.append(row);
  }
  const auto nnz = std::count_if(rda.predict().begin(), rda.predict().end(), [](double v) { return v != 0.0; });
  run.metadata["algorithm_state"] = {
      {"gamma", c.gamma}, {"rho", c.rho}, {"lambda", c.lambda}, {"nonzeros", nnz}, {"theta", rda.predict()}};
}

void run_calibration(const ExperimentConfig& c, Environment& env, SeedRun& run, std::uint64_t run_seed) {
  auto& square = dynamic_cast<SquareEnvironment&>(env);
  Calibrator cal(square.dimension(), CalibrationOptions{c.Y, c.delta, c.T, c.budget});
  const auto& star = square.theta_star();
  const bool closed_form = square.options().design == Design::gaussian;
  const std::uint64_t metric_seed = environment_seed(run_seed, kMetricComponent);
  CalibrationMetrics metrics;
  metrics.linear_risk = [&, closed_form](const DenseVector& theta) {
    if (closed_form) return clipped_linear_excess_risk(theta, star, c.Y);
    return square.predictor_excess_risk([&](ConstVectorView x) { return clip(dot(x, theta), c.Y); }, 20000,
                                        metric_seed)
        .value;
  };
  metrics.mixture_risk = [&](const MixturePredictor& f) {
    return square.predictor_excess_risk([&](ConstVectorView x) { return f(x); }, 10000, metric_seed).value;
  };
  cal.set_metrics(std::move(metrics));
  for (std::int64_t t = 1; t <= c.T; ++t) cal.step(square.draw());
  run.calibration = cal.reports();
  run.metadata["algorithm_state"] = {{"Y", c.Y},
                                     {"delta", c.delta},
                                     {"candidate_steps", cal.candidate_steps()},
                                     {"responses_outside_Y", cal.out_of_range_responses()},
                                     {"session", cal.session()}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

std::uint64_t environment_seed(std::uint64_t master, std::uint64_t run_seed) {
  auto rng = make_engine(master, run_seed, kEnvironmentComponent);
  return rng();
}

std::unique_ptr<Environment> make_environment(const ExperimentConfig& c, std::uint64_t run_seed) {
  const std::uint64_t seed = environment_seed(c.seed, run_seed);
  if (c.loss == LossFamily::quantile) {
    const std::size_t holdout = c.risk_eval == RiskEval::holdout ? QuantileEnvironment::kHoldoutSize : 0;
    return std::make_unique<QuantileEnvironment>(c.d, c.d0, c.alpha_q, c.noise_sd, seed, holdout);
  }
  SquareEnvOptions opt;
  opt.design = c.design;
  opt.clip = c.clip;
  opt.noise_clip = c.noise_clip;
  return std::make_unique<SquareEnvironment>(c.d, c.d0, c.noise_sd, seed, opt);
}

SeedRun run_seed(const ExperimentConfig& c, std::uint64_t seed) {
  c.validate();
  SeedRun run;
  run.seed = seed;
  auto env = make_environment(c, seed);
  run.record.seed = seed;
  run.record.config_hash = config_hash(c);
  run.record.with_se = c.loss == LossFamily::quantile;
  run.record.with_bounds = c.trace_bounds && c.algorithm == Algorithm::saew;
  run.metadata = {{"seed", seed},
                  {"master_seed", c.seed},
                  {"config_hash", run.record.config_hash},
                  {"algorithm", to_string(c.algorithm)},
                  {"T", c.T},
                  {"risk_eval", to_string(c.risk_eval)},
                  {"environment", environment_json(c, *env, environment_seed(c.seed, seed))}};
  switch (c.algorithm) {
    case Algorithm::saew:
      run_accelerated(c, *env, run);
      break;
    case Algorithm::eg:
      run_subroutine(c, *env, run);
      break;
    case Algorithm::rda:
      run_dual_averaging(c, *env, run);
      break;
    case Algorithm::calibrate:
      run_calibration(c, *env, run, seed);
      break;
  }
  return run;
}

std::vector<SeedRun> run_seeds(const ExperimentConfig& c, unsigned threads) {
  c.validate();
  std::vector<SeedRun> runs(c.seeds.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(c.seeds.size()));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(c.seeds.size());
  auto worker = [&] {
    for (std::size_t k = next++; k < c.seeds.size(); k = next++) {
      try {
        runs[k] = run_seed(c, c.seeds[k]);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return runs;
}

ExperimentOutput run_experiment(const ExperimentConfig& c) {
  c.validate();
  const fs::path dir(c.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
  write_text(dir / "config.ini", to_ini(c));

  const auto runs = run_seeds(c, c.threads);
  ExperimentOutput out;
  if (c.algorithm == Algorithm::calibrate) {
    std::ostringstream agg;
    agg << "seed,j,grid_size,best_candidate,meta_risk,best_risk\n";
    for (const auto& r : runs) {
      std::ostringstream os;
      Calibrator::write_reports_csv(r.calibration, os);
      const fs::path file = dir / ("calibration_seed" + std::to_string(r.seed) + ".csv");
      write_text(file, os.str());
      write_text(dir / ("calibration_seed" + std::to_string(r.seed) + ".json"), r.metadata.dump(2) + "\n");
      out.run_files.push_back(file);
      for (const auto& rep : r.calibration) {
        agg << r.seed << ',' << rep.j << ',' << rep.grid_size << ',' << rep.best_candidate << ','
            << format_double(rep.meta_risk) << ',' << format_double(rep.best_risk) << '\n';
      }
    }
    out.summary = dir / "calibration_summary.csv";
    write_text(out.summary, agg.str());
    return out;
  }

  for (const auto& r : runs) {
    std::ostringstream os;
    r.record.write_csv(os);
    const fs::path file = dir / ("run_seed" + std::to_string(r.seed) + ".csv");
    write_text(file, os.str());
    write_text(dir / ("run_seed" + std::to_string(r.seed) + ".json"), r.metadata.dump(2) + "\n");
    out.run_files.push_back(file);
  }
  out.summary = summarize(dir).summary;
  return out;
}

}  // namespace saew
