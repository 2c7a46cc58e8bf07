#include <doctest.h>

#include <charconv>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "saew/core.hpp"

using namespace saew;

TEST_CASE("norms and dot product") {
  const DenseVector v{3.0, -4.0, 0.0};
  CHECK(l1_norm(v) == 7.0);
  CHECK(l2_norm(v) == 5.0);
  CHECK(linf_norm(v) == 4.0);
  CHECK(dot(v, DenseVector{1.0, 1.0, 1.0}) == -1.0);
  CHECK(excess_l2(v, DenseVector{3.0, 0.0, 0.0}) == 4.0);
  CHECK_THROWS_AS(dot(v, DenseVector{1.0}), InvalidInput);
}

TEST_CASE("non-finite inputs are rejected") {
  const DenseVector bad{1.0, std::numeric_limits<double>::quiet_NaN()};
  CHECK_THROWS_AS(require_finite(bad, "v"), InvalidInput);
  CHECK_NOTHROW(require_finite(DenseVector{1.0, 2.0}, "v"));
}

TEST_CASE("l1 ball membership uses an absolute tolerance") {
  const L1Ball ball({1.0, 0.0}, 1.0);
  CHECK(ball_contains(ball, DenseVector{1.0, 1.0}));
  CHECK(ball_contains(ball, DenseVector{1.5, 0.5 + 0.5e-9}));
  CHECK_FALSE(ball_contains(ball, DenseVector{1.5, 0.5 + 1e-8}));
  CHECK_THROWS_AS(L1Ball({0.0}, -1.0), InvalidInput);
}

TEST_CASE("problem parameters are validated against the dimension") {
  ProblemParams p;
  CHECK_NOTHROW(p.validate(3));
  p.d0 = 4;
  CHECK_THROWS_AS(p.validate(3), InvalidInput);
  p = ProblemParams{};
  p.delta = 1.0;
  CHECK_THROWS_AS(p.validate(3), InvalidInput);
  p = ProblemParams{};
  p.alpha = 0.0;
  CHECK_THROWS_AS(p.validate(3), InvalidInput);
  p = ProblemParams{};
  p.U = -1.0;
  CHECK_THROWS_AS(p.validate(3), InvalidInput);
}

TEST_CASE("run records enforce the row contract") {
  RunRecord rec;
  RunRow row;
  row.t = 1;
  row.cum_risk = 0.5;
  rec.append(row);
  row.t = 3;
  CHECK_THROWS_AS(rec.append(row), InvalidInput);
  row.t = 2;
  row.cum_risk = 0.4;
  CHECK_THROWS_AS(rec.append(row), InvalidInput);
  row.cum_risk = 0.6;
  CHECK_NOTHROW(rec.append(row));

  std::ostringstream os;
  rec.write_csv(os);
  const std::string text = os.str();
  CHECK(text.rfind(std::string(kRunCsvHeader) + "\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}

TEST_CASE("optional run columns extend the header") {
  RunRecord rec;
  rec.with_se = true;
  rec.with_bounds = true;
  const auto h = rec.header();
  CHECK(h.size() == 13);
  CHECK(h[7] == "risk_se");
  CHECK(h.back() == "b_prime");
}

TEST_CASE("engine streams are deterministic and separated") {
  auto a = make_engine(7, 1, 2);
  auto b = make_engine(7, 1, 2);
  auto c = make_engine(7, 2, 1);
  auto d = make_engine(8, 1, 2);
  const auto va = a();
  CHECK(va == b());
  CHECK(va != c());
  CHECK(va != d());
}

TEST_CASE("doubles are printed in shortest round-trip form") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 100.0);
  for (int k = 0; k < 1000; ++k) {
    const double v = n(rng) * std::exp2(static_cast<double>(k % 60) - 30.0);
    const std::string s = format_double(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == v);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(2.0) == "2");
}
