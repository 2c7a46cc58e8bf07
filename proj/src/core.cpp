#include "saew/core.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace saew {

void require_finite(ConstVectorView v, const char* what) {
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (!std::isfinite(v[j])) {
      throw InvalidInput(std::string(what) + ": non-finite entry at index " + std::to_string(j));
    }
  }
}

void require_same_dimension(ConstVectorView a, ConstVectorView b, const char* what) {
  if (a.size() != b.size()) {
    throw InvalidInput(std::string(what) + ": dimension mismatch (" + std::to_string(a.size()) +
                       " vs " + std::to_string(b.size()) + ")");
  }
}

double l1_norm(ConstVectorView v) {
  require_finite(v, "l1_norm");
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

double l2_norm(ConstVectorView v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double linf_norm(ConstVectorView v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double dot(ConstVectorView a, ConstVectorView b) {
  require_same_dimension(a, b, "dot");
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

double excess_l2(ConstVectorView v, ConstVectorView theta_star) {
  require_same_dimension(v, theta_star, "excess_l2");
  double s = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double diff = v[j] - theta_star[j];
    s += diff * diff;
  }
  return std::sqrt(s);
}

L1Ball::L1Ball(DenseVector c, double r) : center(std::move(c)), radius(r) {
  if (!(radius >= 0.0) || !std::isfinite(radius)) {
    throw InvalidInput("L1Ball: radius must be finite and >= 0");
  }
  require_finite(center, "L1Ball center");
}

bool ball_contains(const L1Ball& ball, ConstVectorView v) {
  require_same_dimension(ball.center, v, "ball_contains");
  double s = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) s += std::abs(v[j] - ball.center[j]);
  return s <= ball.radius + kBallTolerance;
}

void ProblemParams::validate(std::size_t d) const {
  if (d0 > d) throw InvalidInput("ProblemParams: d0 exceeds the dimension");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidInput("ProblemParams: alpha must be > 0");
  if (!(U > 0.0) || !std::isfinite(U)) throw InvalidInput("ProblemParams: U must be > 0");
  if (!(B > 0.0) || !std::isfinite(B)) throw InvalidInput("ProblemParams: B must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("ProblemParams: delta must lie in (0,1)");
}

const char* to_string(LossFamily family) {
  switch (family) {
    case LossFamily::square:
      return "square";
    case LossFamily::quantile:
      return "quantile";
  }
  return "unknown";
}

void RunRecord::append(const RunRow& row) {
  const std::int64_t expected = rows.empty() ? 1 : rows.back().t + 1;
  if (row.t != expected) throw InvalidInput("RunRecord: rows must have t = 1, 2, ...");
  if (!rows.empty() && row.cum_risk < rows.back().cum_risk) {
    throw InvalidInput("RunRecord: cumulative risk decreased");
  }
  rows.push_back(row);
}

std::mt19937_64 make_engine(std::uint64_t master, std::uint64_t stream, std::uint64_t component) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(master), hi(master), lo(stream), hi(stream), lo(component), hi(component)};
  return std::mt19937_64(seq);
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

std::vector<std::string> RunRecord::header() const {
  std::vector<std::string> h{"t", "l2_error", "risk_hat", "risk_tilde", "cum_risk", "epsilon", "session"};
  if (with_se) h.emplace_back("risk_se");
  if (with_bounds) {
    for (const char* c : {"l2_bar", "l2_bound", "err", "a_prime", "b_prime"}) h.emplace_back(c);
  }
  return h;
}

void RunRecord::write_csv(std::ostream& out) const {
  const auto h = header();
  for (std::size_t k = 0; k < h.size(); ++k) out << (k ? "," : "") << h[k];
  out << '\n';
  for (const auto& r : rows) {
    out << r.t << ',' << format_double(r.l2_error) << ',' << format_double(r.risk_hat) << ','
        << format_double(r.risk_tilde) << ',' << format_double(r.cum_risk) << ','
        << format_double(r.epsilon) << ',' << r.session;
    if (with_se) out << ',' << format_double(r.risk_se);
    if (with_bounds) {
      out << ',' << format_double(r.l2_bar) << ',' << format_double(r.l2_bound) << ','
          << format_double(r.err) << ',' << format_double(r.a_prime) << ',' << format_double(r.b_prime);
    }
    out << '\n';
  }
}

}  // namespace saew
