#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "saew/core.hpp"
#include "saew/losses.hpp"

namespace saew {

/// Invalid or unknown configuration entry. `key()` names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key + ": " + message), key_(std::move(key)) {}

  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Output directory or file could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Algorithm { saew, eg, rda, calibrate };
enum class RiskEval { exact, holdout };

const char* to_string(Algorithm a);
const char* to_string(RiskEval r);

struct ExperimentConfig {
  // environment
  LossFamily loss = LossFamily::square;
  std::size_t d = 20;
  std::size_t d0 = 3;
  double noise_sd = 0.1;
  double alpha_q = 0.8;
  Design design = Design::gaussian;
  double clip = 3.0;
  double noise_clip = 3.0;

  // runs
  std::uint64_t seed = 1;  // master seed
  std::vector<std::uint64_t> seeds{1};
  Algorithm algorithm = Algorithm::saew;
  std::int64_t T = 1000;
  std::string out = "out";
  bool trace_bounds = false;
  RiskEval risk_eval = RiskEval::exact;
  unsigned threads = 0;  // 0: one per hardware thread

  // saew / eg
  double alpha = 1.0;
  double U = 1.0;
  double B = 1.0;
  double delta = 0.05;
  std::size_t saew_d0 = 0;  // 0: the environment's sparsity (plus the intercept for quantile)

  // rda
  double gamma = 1.0;
  double rho = 0.0;
  double lambda = 0.0;

  // calibrate
  double Y = 4.0;
  std::uint64_t budget = 100000000;

  /// Throws ConfigError naming the first invalid key.
  void validate() const;

  /// Dimension of the parameter vector (d + 1 with the quantile intercept).
  std::size_t parameter_dimension() const;
  /// Sparsity budget handed to the accelerated procedure.
  std::size_t effective_saew_d0() const;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Flat `key = value` text; `#` and `;` start comments. Unknown keys are errors.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(to_ini(c)) == c.
std::string to_ini(const ExperimentConfig& c);

/// FNV-1a 64 of the canonical text without `out` and `threads`, as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);

}  // namespace saew
