#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace saew {

using DenseVector = std::vector<double>;
using ConstVectorView = std::span<const double>;

/// Thrown for every precondition violation on public operations.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Absolute slack used by every l1-ball membership test.
inline constexpr double kBallTolerance = 1e-9;

void require_finite(ConstVectorView v, const char* what);
void require_same_dimension(ConstVectorView a, ConstVectorView b, const char* what);

// Plain left-to-right summation; d stays in the thousands here.
double l1_norm(ConstVectorView v);
double l2_norm(ConstVectorView v);
double linf_norm(ConstVectorView v);
double dot(ConstVectorView a, ConstVectorView b);

/// ||v - theta_star||_2
double excess_l2(ConstVectorView v, ConstVectorView theta_star);

struct L1Ball {
  DenseVector center;
  double radius = 0.0;

  L1Ball() = default;
  L1Ball(DenseVector c, double r);

  std::size_t dimension() const { return center.size(); }
};

bool ball_contains(const L1Ball& ball, ConstVectorView v);

/// Constants (a, b) of a subroutine's regret certificate
///   regret <= radius * (a * sqrt(sum ||g||_inf^2) + b * B).
struct RegretCertificate {
  double a = 0.0;
  double b = 0.0;
};

/// Tuning of the accelerated procedure: sparsity budget, strong convexity
/// constant, l1 radius bound, gradient sup-norm bound and failure probability.
struct ProblemParams {
  std::size_t d0 = 1;
  double alpha = 1.0;
  double U = 1.0;
  double B = 1.0;
  double delta = 0.05;

  /// Throws InvalidInput unless d0 <= d and the reals are in range.
  void validate(std::size_t d) const;
};

struct Sample {
  DenseVector x;
  double y = 0.0;
};

struct RiskEstimate {
  double value = 0.0;
  double se = 0.0;  // zero for closed-form evaluations
};

enum class LossFamily { square, quantile };

const char* to_string(LossFamily family);

/// Optimizers only ever see this: a point goes in, a (sub)gradient comes out.
using GradientOracle = std::function<DenseVector(const DenseVector&)>;

/// Seeded i.i.d. stream of loss samples.
///
/// The minimizer of the risk is only reachable through `theta_star()` and the
/// risk evaluators, which the harness uses for metrics. Optimizers take a
/// GradientOracle and never hold an Environment.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::size_t dimension() const = 0;
  virtual LossFamily family() const = 0;

  virtual Sample draw() = 0;
  virtual double loss(ConstVectorView theta, const Sample& s) const = 0;
  virtual DenseVector gradient(ConstVectorView theta, const Sample& s) const = 0;

  // Metrics-only access path.
  virtual const DenseVector& theta_star() const = 0;
  virtual RiskEstimate excess_risk(ConstVectorView theta) const = 0;
};

/// One row of a run trace.
struct RunRow {
  std::int64_t t = 0;
  double l2_error = 0.0;
  double risk_hat = 0.0;
  double risk_tilde = 0.0;
  double cum_risk = 0.0;
  double epsilon = 0.0;
  int session = 0;
  double risk_se = 0.0;

  // Only written when bound traces are requested.
  double l2_bar = 0.0;
  double l2_bound = 0.0;
  double err = 0.0;
  double a_prime = 0.0;
  double b_prime = 0.0;
};

struct RunRecord {
  std::uint64_t seed = 0;
  std::string config_hash;
  bool with_se = false;
  bool with_bounds = false;
  std::vector<RunRow> rows;

  /// Appends a row, enforcing strictly increasing t (from 1) and a
  /// nondecreasing cumulative risk.
  void append(const RunRow& row);

  std::vector<std::string> header() const;
  void write_csv(std::ostream& out) const;
};

inline constexpr const char* kRunCsvHeader = "t,l2_error,risk_hat,risk_tilde,cum_risk,epsilon,session";

/// Generator for one (master, stream, component) triple. Streams are split by
/// hashing the triple, so adding a seed or a component never perturbs others.
std::mt19937_64 make_engine(std::uint64_t master, std::uint64_t stream, std::uint64_t component);

/// Locale-independent shortest round-trip formatting.
std::string format_double(double v);

}  // namespace saew
