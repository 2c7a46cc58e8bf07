// Acceptance gate: one PASS/FAIL line per criterion; nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "saew/accelerator.hpp"
#include "saew/bounds.hpp"
#include "saew/calibration.hpp"
#include "saew/harness.hpp"
#include "saew/losses.hpp"
#include "saew/subroutine.hpp"

using namespace saew;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<std::uint64_t> seed_range(std::uint64_t n) {
  std::vector<std::uint64_t> s(n);
  for (std::uint64_t k = 0; k < n; ++k) s[k] = k + 1;
  return s;
}

double median(std::vector<double> v) { return quartiles(std::move(v)).median; }

// Per-t median of one trace column across runs.
std::vector<double> median_curve(const std::vector<SeedRun>& runs, double RunRow::*field) {
  const std::size_t n = runs.front().record.rows.size();
  std::vector<double> out(n);
  std::vector<double> column(runs.size());
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t r = 0; r < runs.size(); ++r) column[r] = runs[r].record.rows[t].*field;
    out[t] = median(column);
  }
  return out;
}

bool rel_close(double got, double want, double tol) {
  return std::abs(got - want) <= tol * std::max(std::abs(want), 1e-300);
}

std::string printf_string(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

// ---- experiment configurations ---------------------------------------------

ExperimentConfig coverage_config() {
  ExperimentConfig c;
  c.d = 20;
  c.d0 = 3;
  c.noise_sd = 0.1;
  c.delta = 0.05;
  c.T = 5000;
  c.seeds = seed_range(60);
  c.alpha = 32.0;
  c.U = 1.0;
  c.B = 16.0;
  return c;
}

ExperimentConfig quantile_config() {
  ExperimentConfig c;
  c.loss = LossFamily::quantile;
  c.d = 20;
  c.d0 = 3;
  c.alpha_q = 0.8;
  c.noise_sd = 0.1;
  c.T = 100000;
  c.seeds = seed_range(10);
  c.alpha = 8.0;
  c.U = 1.25;
  c.B = 4.0;
  return c;
}

ExperimentConfig small_dimension_config(Algorithm a) {
  ExperimentConfig c;
  c.d = 2;
  c.d0 = 2;
  c.noise_sd = 0.3;
  c.T = 10000;
  c.seeds = seed_range(10);
  c.algorithm = a;
  c.U = 2.0;
  c.B = 2.0;
  c.alpha = 128.0;
  return c;
}

// ---- criterion 1: subroutine certificate -----------------------------------

struct CertificateCheck {
  std::size_t sequences = 0;
  std::size_t violations = 0;
  std::size_t outside_ball = 0;
};

using Adversary = std::function<DenseVector(std::int64_t t, const DenseVector& prediction, std::mt19937_64& rng)>;

void check_sequence(const L1Ball& ball, double B, std::int64_t T, const Adversary& next, std::mt19937_64& rng,
                    CertificateCheck& out) {
  const std::size_t d = ball.dimension();
  ExponentiatedGradient eg(ball, B);
  DenseVector corner_loss(2 * d, 0.0);
  double learner = 0.0, v2 = 0.0;
  for (std::int64_t t = 1; t <= T; ++t) {
    const DenseVector p = eg.predict();
    if (!ball_contains(ball, p)) ++out.outside_ball;
    DenseVector g = next(t, p, rng);
    for (double& x : g) x = std::clamp(x, -B, B);
    learner += dot(g, p);
    const double c = dot(g, ball.center);
    for (std::size_t j = 0; j < d; ++j) {
      corner_loss[j] += c + ball.radius * g[j];
      corner_loss[d + j] += c - ball.radius * g[j];
    }
    v2 += linf_norm(g) * linf_norm(g);
    eg.update(g);
  }
  const double best = *std::min_element(corner_loss.begin(), corner_loss.end());
  const auto cert = eg_certificate(d);
  const double allowance = ball.radius * (cert.a * std::sqrt(v2) + cert.b * B);
  ++out.sequences;
  if (learner - best > allowance + 1e-9 * std::max(1.0, allowance)) ++out.violations;
}

Outcome criterion_subroutine_certificate(CertificateCheck& check) {
  const auto start = Clock::now();
  std::mt19937_64 rng(20240601);
  const std::size_t dims[] = {1, 2, 5, 10};
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  std::uniform_int_distribution<std::int64_t> horizon(1, 1000);

  const auto random_ball = [&](std::size_t d) {
    DenseVector center(d);
    for (double& x : center) x = unit(rng);
    return L1Ball(std::move(center), scale(rng) / 5.0);
  };

  for (int k = 0; k < 500; ++k) {
    const std::size_t d = dims[k % 4];
    const L1Ball ball = random_ball(d);
    const double B = scale(rng);
    DenseVector bias(d);
    for (double& x : bias) x = 0.5 * B * unit(rng);
    const double spread = B * std::abs(unit(rng));
    const Adversary noisy = [&](std::int64_t, const DenseVector&, std::mt19937_64& r) {
      DenseVector g(d);
      for (std::size_t j = 0; j < d; ++j) g[j] = bias[j] + spread * unit(r);
      return g;
    };
    check_sequence(ball, B, horizon(rng), noisy, rng, check);
  }

  // Adversarial patterns: five kinds, each in four dimensions.
  const std::vector<std::function<Adversary(std::size_t, double)>> kinds = {
      // Constant push on one coordinate.
      [](std::size_t d, double B) {
        return [d, B](std::int64_t, const DenseVector&, std::mt19937_64&) {
          DenseVector g(d, 0.0);
          g[d - 1] = B;
          return g;
        };
      },
      // Sign alternating every step.
      [](std::size_t d, double B) {
        return [d, B](std::int64_t t, const DenseVector&, std::mt19937_64&) {
          return DenseVector(d, t % 2 == 0 ? B : -B);
        };
      },
      // Best corner switches halfway.
      [](std::size_t d, double B) {
        return [d, B](std::int64_t t, const DenseVector&, std::mt19937_64&) {
          DenseVector g(d, 0.0);
          g[0] = t <= 500 ? B : -B;
          return g;
        };
      },
      // Reactive: punish the largest coordinate of the current prediction.
      [](std::size_t d, double B) {
        return [d, B](std::int64_t, const DenseVector& p, std::mt19937_64&) {
          DenseVector g(d, 0.0);
          std::size_t arg = 0;
          for (std::size_t j = 1; j < d; ++j) {
            if (std::abs(p[j]) > std::abs(p[arg])) arg = j;
          }
          g[arg] = p[arg] >= 0.0 ? B : -B;
          return g;
        };
      },
      // Silence followed by a burst.
      [](std::size_t d, double B) {
        return [d, B](std::int64_t t, const DenseVector&, std::mt19937_64&) {
          DenseVector g(d, 0.0);
          if (t > 900) g[0] = -B;
          return g;
        };
      },
  };
  for (const auto& kind : kinds) {
    for (std::size_t d : dims) {
      const L1Ball ball = random_ball(d);
      const double B = scale(rng);
      check_sequence(ball, B, 1000, kind(d, B), rng, check);
    }
  }
  const double secs = seconds_since(start);
  return {check.violations == 0 && check.sequences == 520 && secs < 10.0,
          printf_string("%zu sequences, %zu certificate violations, %.2f s (limit 10 s)", check.sequences, check.violations, secs)};
}

// ---- criterion 2: ball membership ------------------------------------------

struct MembershipCount {
  std::uint64_t predictions = 0;
  std::uint64_t outside_ball = 0;
  std::uint64_t checked_norm = 0;
  std::uint64_t norm_violations = 0;
};

void replay_accelerated(const ExperimentConfig& c, const std::vector<SeedRun>& runs, MembershipCount& m) {
  for (const auto& run : runs) {
    auto env = make_environment(c, run.seed);
    const ProblemParams params{c.effective_saew_d0(), c.alpha, c.U, c.B, c.delta};
    Accelerator acc(params, env->dimension());
    const bool induction = run.metadata.at("algorithm_state").at("induction_held").get<bool>();
    for (std::int64_t t = 1; t <= c.T; ++t) {
      const Sample s = env->draw();
      const DenseVector played = acc.next_prediction();
      ++m.predictions;
      if (!ball_contains(L1Ball(acc.session_center(), acc.session_radius()), played)) ++m.outside_ball;
      if (induction) {
        ++m.checked_norm;
        if (l1_norm(played) > 2.0 * c.U + 1e-9) ++m.norm_violations;
      }
      acc.observe(env->gradient(played, s));
    }
    if (acc.theta_tilde() != run.metadata.at("algorithm_state").at("theta_tilde").get<DenseVector>()) {
      ++m.outside_ball;  // replay diverged from the recorded run
    }
  }
}

void replay_subroutine(const ExperimentConfig& c, MembershipCount& m) {
  for (std::uint64_t seed : c.seeds) {
    auto env = make_environment(c, seed);
    const L1Ball ball(DenseVector(env->dimension(), 0.0), c.U);
    ExponentiatedGradient eg(ball, c.B);
    for (std::int64_t t = 1; t <= c.T; ++t) {
      const Sample s = env->draw();
      const DenseVector played = eg.predict();
      ++m.predictions;
      if (!ball_contains(ball, played)) ++m.outside_ball;
      eg.update(env->gradient(played, s));
    }
  }
}

// ---- criteria 3 and 4 -------------------------------------------------------

Outcome criterion_induction(const std::vector<SeedRun>& runs, double secs) {
  std::size_t held = 0;
  std::size_t sessions = 0;
  for (const auto& r : runs) {
    const auto& state = r.metadata.at("algorithm_state");
    held += state.at("induction_held").get<bool>();
    sessions += state.at("sessions").size();
  }
  const double frac = static_cast<double>(held) / static_cast<double>(runs.size());
  return {frac >= 0.95 && secs < 120.0 && sessions > 0,
          printf_string("induction held in %zu/%zu runs (%.3f, need >= 0.95), %zu completed sessions, %.1f s (limit 120 s)",
              held, runs.size(), frac, sessions, secs)};
}

Outcome criterion_session_lengths(const std::vector<SeedRun>& runs) {
  std::size_t eligible = 0, sessions = 0, violations = 0;
  for (const auto& r : runs) {
    const auto& state = r.metadata.at("algorithm_state");
    if (!state.at("gradients_within_B").get<bool>()) continue;
    ++eligible;
    const double gamma = state.at("gamma").get<double>();
    for (const auto& s : state.at("sessions")) {
      const auto length = s.at("length").get<std::int64_t>();
      if (length == 0) continue;
      ++sessions;
      const double bound = session_length_bound(gamma, s.at("a_prime_end").get<double>(),
                                                s.at("b_prime_end").get<double>(), s.at("index").get<int>());
      if (static_cast<double>(length) > bound) ++violations;
    }
  }
  return {violations == 0 && eligible > 0 && sessions > 0,
          printf_string("%zu/%zu runs kept gradients within B, %zu sessions checked, %zu violations", eligible, runs.size(),
              sessions, violations)};
}

// ---- criterion 5 -------------------------------------------------------------

Outcome criterion_fast_rate(const std::vector<SeedRun>& runs, double secs) {
  const std::vector<double> risk = median_curve(runs, &RunRow::risk_tilde);
  std::vector<std::int64_t> t(risk.size());
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = static_cast<std::int64_t>(k + 1);
  const std::int64_t T = static_cast<std::int64_t>(t.size());
  const double slope = loglog_slope(t, risk, T / 10, T);
  std::size_t induction = 0;
  for (const auto& r : runs) induction += r.metadata.at("algorithm_state").at("induction_held").get<bool>();
  return {slope <= -0.8 && secs < 600.0,
          printf_string("log-log slope of median excess risk over [%lld, %lld] = %.3f (need <= -0.8), induction %zu/%zu, "
              "%.1f s (limit 600 s)",
              static_cast<long long>(T / 10), static_cast<long long>(T), slope, induction, runs.size(), secs)};
}

// ---- criterion 6 -------------------------------------------------------------

Outcome criterion_acceleration(const std::vector<SeedRun>& accelerated, const std::vector<SeedRun>& plain) {
  const std::vector<double> fast = median_curve(accelerated, &RunRow::cum_risk);
  const std::vector<double> slow = median_curve(plain, &RunRow::cum_risk);
  std::vector<double> log_t(fast.size()), sqrt_t(fast.size());
  for (std::size_t k = 0; k < fast.size(); ++k) {
    log_t[k] = std::log(static_cast<double>(k + 1));
    sqrt_t[k] = std::sqrt(static_cast<double>(k + 1));
  }
  std::vector<double> final_fast, final_slow;
  for (const auto& r : accelerated) final_fast.push_back(r.record.rows.back().cum_risk);
  for (const auto& r : plain) final_slow.push_back(r.record.rows.back().cum_risk);
  const double m_fast = median(final_fast), m_slow = median(final_slow);
  const double r2_fast = linear_fit_r2(log_t, fast);
  const double r2_slow = linear_fit_r2(sqrt_t, slow);
  return {m_fast <= 0.5 * m_slow && r2_fast >= 0.95 && r2_slow >= 0.95,
          printf_string("median cumulative excess risk %.3f vs %.3f (ratio %.3f, need <= 0.5); R2 against log t %.3f, "
              "against sqrt t %.3f (need >= 0.95)",
              m_fast, m_slow, m_fast / m_slow, r2_fast, r2_slow)};
}

// ---- criterion 7 -------------------------------------------------------------

Outcome criterion_bound_coverage() {
  std::ostringstream detail;
  bool pass = true;

  // Instantaneous bound over truncated-design runs with a certified gradient bound.
  ExperimentConfig c;
  c.d = 20;
  c.d0 = 3;
  c.noise_sd = 0.1;
  c.design = Design::truncated;
  c.clip = 3.0;
  c.noise_clip = 3.0;
  c.T = 2000;
  c.seeds = seed_range(200);
  c.delta = 0.05;
  c.U = 1.0;
  {
    auto probe = make_environment(c, 1);
    const auto& sq = dynamic_cast<const SquareEnvironment&>(*probe);
    c.alpha = sq.strong_convexity();
    c.B = gradient_bound_square(sq.x_bound(), sq.y_bound(), c.U);
  }
  const auto runs = run_seeds(c, 1);
  const ProblemParams params{c.d0, c.alpha, c.U, c.B, c.delta};
  const double bound = theorem1_bound(params, eg_certificate(c.d), c.T);
  std::size_t covered = 0;
  for (const auto& r : runs) {
    auto env = make_environment(c, r.seed);
    const auto theta = r.metadata.at("algorithm_state").at("theta_tilde").get<DenseVector>();
    covered += env->excess_risk(theta).value <= bound;
  }
  const double frac = static_cast<double>(covered) / static_cast<double>(runs.size());
  pass = pass && frac >= 0.95;
  detail << printf_string("instantaneous bound %.4g covered %zu/%zu runs (%.3f)", bound, covered, runs.size(), frac);

  // Poisson-type inequality: sums of 100 uniforms.
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const int trials = 10000;
  const double poisson = poisson_bound(50.0, 1.0, 0.05);
  int poisson_violations = 0;
  for (int k = 0; k < trials; ++k) {
    double s = 0.0;
    for (int t = 0; t < 100; ++t) s += u01(rng);
    poisson_violations += s > poisson;
  }
  const double pf = static_cast<double>(poisson_violations) / trials;
  pass = pass && pf <= 0.05;
  detail << printf_string("; Poisson bound violated in %.4f of trials", pf);

  // Regret-to-risk conversion: i.i.d. linear losses, fixed plays at l1 distance eps.
  const std::size_t d = 5;
  const std::int64_t T = 1000;
  const double eps = 0.5, B = 1.0;
  DenseVector mean(d);
  for (std::size_t j = 0; j < d; ++j) mean[j] = 0.3 - 0.15 * static_cast<double>(j);
  std::vector<DenseVector> offsets(static_cast<std::size_t>(T), DenseVector(d, 0.0));
  for (std::int64_t t = 0; t < T; ++t) {
    offsets[static_cast<std::size_t>(t)][static_cast<std::size_t>(t) % d] = (t / 7) % 2 == 0 ? eps : -eps;
  }
  int conversion_violations = 0;
  for (int k = 0; k < trials; ++k) {
    double martingale = 0.0, v2 = 0.0;
    DenseVector g(d);
    for (std::int64_t t = 0; t < T; ++t) {
      for (std::size_t j = 0; j < d; ++j) g[j] = std::clamp(mean[j] + 0.7 * (2.0 * u01(rng) - 1.0), -B, B);
      const DenseVector& off = offsets[static_cast<std::size_t>(t)];
      for (std::size_t j = 0; j < d; ++j) martingale += (mean[j] - g[j]) * off[j];
      v2 += linf_norm(g) * linf_norm(g);
    }
    conversion_violations += martingale > regret_to_risk_bound(eps, B, v2, T, 0.05);
  }
  const double cf = static_cast<double>(conversion_violations) / trials;
  pass = pass && cf <= 0.05;
  detail << printf_string("; conversion bound violated in %.4f of trials (limits 0.95 / 0.05 / 0.05)", cf);
  return {pass, detail.str()};
}

// ---- criterion 8 -------------------------------------------------------------

Outcome criterion_formula_examples() {
  struct Example {
    const char* name;
    double got;
    double want;
    double tol;
  };
  const double Y1 = 1.0;
  const QuantileEnvironment quantile(20, 3, 0.8, 0.1, 1);
  const std::vector<Example> examples = {
      {"radius", radius_bound(1, 1.0, 0, 2.0, 1, 1.0), 2.0, 1e-9},
      {"a_prime", a_prime(0.0, 2, std::exp(-2.0)), 2.0, 1e-9},
      {"b_prime", b_prime(0.0, 2, std::exp(-1.0)), 1.5, 1e-9},
      {"err", err_bound(25.0, 1.0, 2.0, 0.5), 6.0, 1e-9},
      {"gradient_bound", gradient_bound_square(1.0, Y1, 1.0), 6.0, 1e-9},
      {"poisson", poisson_bound(0.0, 1.0, std::exp(-1.0)), 1.0, 1e-9},
      {"session_length", session_length_bound(1.0, 1.0, 1.0, 0), 3.0, 1e-9},
      {"lemma3", lemma3_min_radius(1.0, 1.0, 1.0, 0.0, 2), 2.0, 1e-9},
      {"pinball_above", pinball_loss(DenseVector{0.0}, DenseVector{1.0}, 1.0, 0.8), 0.8, 1e-9},
      {"pinball_below", pinball_loss(DenseVector{0.0}, DenseVector{1.0}, -1.0, 0.8), 0.2, 1e-9},
      {"intercept_shift", quantile.intercept_shift(), 0.08416, 1e-4},
      {"eg_certificate", eg_certificate(1).a, 2.355, 1e-3},
  };
  std::size_t failed = 0;
  std::string which;
  for (const auto& e : examples) {
    if (!rel_close(e.got, e.want, e.tol)) {
      ++failed;
      which += printf_string(" %s=%.12g", e.name, e.got);
    }
  }
  return {failed == 0, printf_string("%zu/%zu examples reproduced%s", examples.size() - failed, examples.size(), which.c_str())};
}

// ---- criterion 9 -------------------------------------------------------------

struct CalibrationSummary {
  bool monotone = true;
  double final_meta = 0.0;
  double final_best = 0.0;
  std::string medians;
};

CalibrationSummary summarize_calibration(const std::vector<SeedRun>& runs) {
  std::map<int, std::vector<double>> meta, best;
  for (const auto& r : runs) {
    for (const auto& rep : r.calibration) {
      meta[rep.j].push_back(rep.meta_risk);
      best[rep.j].push_back(rep.best_risk);
    }
  }
  CalibrationSummary s;
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& [j, values] : meta) {
    if (j == 0) continue;  // the session-0 estimator is the zero function
    const double m = median(values);
    s.monotone = s.monotone && m <= prev;
    prev = m;
    s.medians += printf_string(" %d:%.3g", j, m);
    s.final_meta = m;
    s.final_best = median(best[j]);
  }
  return s;
}

Outcome criterion_calibration() {
  ExperimentConfig c;
  c.algorithm = Algorithm::calibrate;
  c.d = 4;
  c.d0 = 1;
  c.T = std::int64_t{1} << 14;
  c.seeds = seed_range(10);
  c.budget = std::numeric_limits<std::uint64_t>::max();

  const std::uint64_t per_seed = required_candidate_steps(c.d, c.Y, c.T);
  const double total = static_cast<double>(per_seed) * static_cast<double>(c.seeds.size());

  if (std::getenv("SAEW_ACCEPTANCE_FULL") != nullptr) {
    const auto start = Clock::now();
    const auto runs = run_seeds(c, 0);
    const double secs = seconds_since(start);
    const CalibrationSummary s = summarize_calibration(runs);
    return {s.monotone && s.final_meta <= 4.0 * s.final_best && secs < 300.0,
            printf_string("medians by session:%s; final %.3g vs best candidate %.3g; %.0f s (limit 300 s)", s.medians.c_str(),
                s.final_meta, s.final_best, secs)};
  }

  // Throughput probe on a shorter horizon, then the full-scale projection.
  ExperimentConfig probe = c;
  probe.T = std::int64_t{1} << 9;
  probe.seeds = {1};
  const auto start = Clock::now();
  const auto runs = run_seeds(probe, 1);
  const double secs = seconds_since(start);
  const double rate = static_cast<double>(required_candidate_steps(c.d, c.Y, probe.T)) / secs;
  const double projected = total / rate;
  const CalibrationSummary s = summarize_calibration(runs);
  const bool feasible = projected < 300.0;
  return {false,
          printf_string("full scale needs %.3g candidate steps; measured %.3g steps/s gives a projected %.0f s (limit 300 s)%s; "
              "probe at T=%lld, 1 seed: medians by session:%s, final %.3g vs best candidate %.3g",
              total, rate, projected, feasible ? "; set SAEW_ACCEPTANCE_FULL=1 to run it" : "",
              static_cast<long long>(probe.T), s.medians.c_str(), s.final_meta, s.final_best)};
}

// ---- criterion 10 -------------------------------------------------------------

Outcome criterion_gradients() {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> n;
  const auto vec = [&](std::size_t d) {
    DenseVector v(d);
    for (double& x : v) x = n(rng);
    return v;
  };
  std::size_t fd_violations = 0, subgrad_violations = 0;
  for (int k = 0; k < 1000; ++k) {
    const std::size_t d = 1 + static_cast<std::size_t>(k % 8);
    const DenseVector theta = vec(d), x = vec(d);
    const double y = 2.0 * n(rng);
    const DenseVector g = square_grad(theta, x, y);
    for (std::size_t j = 0; j < d; ++j) {
      const double h = 1e-5;
      DenseVector up = theta, dn = theta;
      up[j] += h;
      dn[j] -= h;
      const double fd = (square_loss(up, x, y) - square_loss(dn, x, y)) / (2.0 * h);
      if (std::abs(fd - g[j]) > 1e-6 * std::max(1.0, std::abs(g[j]))) ++fd_violations;
    }
    const DenseVector other = vec(d);
    const double q = 0.05 + 0.9 * std::abs(std::erf(n(rng)));
    DenseVector diff(d);
    for (std::size_t j = 0; j < d; ++j) diff[j] = other[j] - theta[j];
    const double lhs = pinball_loss(other, x, y, q);
    const double rhs = pinball_loss(theta, x, y, q) + dot(pinball_subgrad(theta, x, y, q), diff);
    if (lhs < rhs - 1e-12 * std::max(1.0, std::abs(rhs))) ++subgrad_violations;
  }
  return {fd_violations == 0 && subgrad_violations == 0,
          printf_string("1000 triples: %zu finite-difference and %zu subgradient-inequality violations", fd_violations,
              subgrad_violations)};
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::err);
  std::map<int, Outcome> results;

  CertificateCheck cert;
  results[1] = criterion_subroutine_certificate(cert);

  auto start = Clock::now();
  const ExperimentConfig coverage = coverage_config();
  const auto coverage_runs = run_seeds(coverage, 1);
  results[3] = criterion_induction(coverage_runs, seconds_since(start));
  results[4] = criterion_session_lengths(coverage_runs);

  start = Clock::now();
  const ExperimentConfig quantile = quantile_config();
  const auto quantile_runs = run_seeds(quantile, 1);
  results[5] = criterion_fast_rate(quantile_runs, seconds_since(start));

  const ExperimentConfig small_saew = small_dimension_config(Algorithm::saew);
  const ExperimentConfig small_eg = small_dimension_config(Algorithm::eg);
  const auto small_saew_runs = run_seeds(small_saew, 1);
  const auto small_eg_runs = run_seeds(small_eg, 1);
  results[6] = criterion_acceleration(small_saew_runs, small_eg_runs);

  {
    MembershipCount m;
    replay_accelerated(coverage, coverage_runs, m);
    replay_accelerated(quantile, quantile_runs, m);
    replay_accelerated(small_saew, small_saew_runs, m);
    replay_subroutine(small_eg, m);
    m.outside_ball += cert.outside_ball;
    results[2] = {m.outside_ball == 0 && m.norm_violations == 0,
                  printf_string("%llu accelerated and subroutine predictions replayed plus the certificate sequences: %llu "
                      "outside their ball; %llu checked against 2U, %llu violations",
                      static_cast<unsigned long long>(m.predictions), static_cast<unsigned long long>(m.outside_ball),
                      static_cast<unsigned long long>(m.checked_norm),
                      static_cast<unsigned long long>(m.norm_violations))};
  }

  results[7] = criterion_bound_coverage();
  results[8] = criterion_formula_examples();
  results[9] = criterion_calibration();
  results[10] = criterion_gradients();

  bool all = true;
  for (const auto& [id, o] : results) {
    std::printf("criterion %d: %s  %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    all = all && o.pass;
  }
  std::fflush(stdout);
  return all ? 0 : 1;
}
