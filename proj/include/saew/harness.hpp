#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "saew/calibration.hpp"
#include "saew/config.hpp"
#include "saew/core.hpp"

namespace saew {

/// Seed of the environment for one run; a pure function of (master, run_seed).
std::uint64_t environment_seed(std::uint64_t master, std::uint64_t run_seed);

std::unique_ptr<Environment> make_environment(const ExperimentConfig& c, std::uint64_t run_seed);

struct SeedRun {
  std::uint64_t seed = 0;
  RunRecord record;
  nlohmann::json metadata;
  std::vector<SessionReport> calibration;  // only for algorithm = calibrate
};

/// One seeded run, entirely in memory.
SeedRun run_seed(const ExperimentConfig& c, std::uint64_t run_seed);

/// All seeds of the config on up to `threads` workers (0: hardware
/// concurrency). The result is ordered as c.seeds and independent of threads.
std::vector<SeedRun> run_seeds(const ExperimentConfig& c, unsigned threads);

struct ExperimentOutput {
  std::vector<std::filesystem::path> run_files;
  std::filesystem::path summary;
};

/// Runs every seed and writes, under c.out: run_seed<k>.csv and
/// run_seed<k>.json per seed, summary.csv, scalars.csv and config.ini.
/// Calibration runs write calibration_seed<k>.csv instead of run traces.
ExperimentOutput run_experiment(const ExperimentConfig& c);

// ---- summaries -------------------------------------------------------------

struct Quartiles {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double mean = 0.0;
};

/// Linear-interpolation quartiles and mean. `values` must be nonempty.
Quartiles quartiles(std::vector<double> values);

/// Least-squares slope of log(y) against log(t) over t_from <= t <= t_to,
/// skipping nonpositive y.
double loglog_slope(std::span<const std::int64_t> t, std::span<const double> y, std::int64_t t_from,
                    std::int64_t t_to);

/// Coefficient of determination of the least-squares line y ~ a + b x.
double linear_fit_r2(std::span<const double> x, std::span<const double> y);

/// A run CSV read back as named columns.
struct RunTable {
  std::vector<std::string> header;
  std::vector<std::int64_t> t;
  std::vector<std::vector<double>> columns;  // one per header entry, t included

  const std::vector<double>& column(const std::string& name) const;
};

RunTable read_run_csv(const std::filesystem::path& path);

struct RunScalars {
  std::string name;
  double final_log_l2 = 0.0;
  double final_cum_risk = 0.0;
  double l2_slope = 0.0;  // log-log slope of l2_error over the second half
};

RunScalars run_scalars(const std::string& name, const RunTable& run);

/// Per-t median, quartiles and mean of log l2_error and cum_risk.
void write_summary_csv(const std::vector<RunTable>& runs, std::ostream& out);
void write_scalars_csv(const std::vector<RunScalars>& scalars, std::ostream& out);

struct SummaryOutput {
  std::filesystem::path summary;
  std::filesystem::path scalars;
  std::vector<RunScalars> runs;
};

/// Reads every run_seed*.csv of `dir`, checks they share one schema and
/// length, and writes summary.csv and scalars.csv next to them.
SummaryOutput summarize(const std::filesystem::path& dir);

/// Writes gnuplot scripts and their data files into `dir` (relative paths
/// only): log l2 error against log t, cumulative risk against t, and for
/// the first accelerated run the session staircase with one marker per
/// session start. Returns the scripts written.
std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& dir);

}  // namespace saew
