#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "saew/calibration.hpp"
#include "saew/config.hpp"
#include "saew/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

int report_run(const saew::ExperimentOutput& out) {
  for (const auto& f : out.run_files) std::cout << f.string() << '\n';
  if (!out.summary.empty()) std::cout << out.summary.string() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse accelerated online estimation: runs, summaries, plots and calibration"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  bool trace_bounds = false;
  auto* run = app.add_subcommand("run", "Run every seed of a configuration");
  run->add_option("--config", config_path, "Configuration file")->required();
  run->add_option("--out", out_dir, "Output directory (overrides the config)");
  run->add_flag("--trace-bounds", trace_bounds, "Add bound columns to the run traces");

  std::string dir;
  auto* summarize = app.add_subcommand("summarize", "Aggregate run traces of a directory");
  summarize->add_option("dir", dir, "Directory holding run_seed*.csv")->required();

  auto* plots = app.add_subcommand("plots", "Write gnuplot scripts for a run directory");
  plots->add_option("dir", dir, "Directory holding run_seed*.csv")->required();

  std::optional<double> Y;
  std::optional<double> delta;
  std::optional<std::uint64_t> budget;
  auto* calibrate = app.add_subcommand("calibrate", "Run the parameter-free calibration procedure");
  calibrate->add_option("--config", config_path, "Configuration file")->required();
  calibrate->add_option("--out", out_dir, "Output directory (overrides the config)");
  calibrate->add_option("--Y", Y, "Clipping range of the predictions");
  calibrate->add_option("--delta", delta, "Failure probability");
  calibrate->add_option("--budget", budget, "Maximum number of candidate steps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed() || calibrate->parsed()) {
      saew::ExperimentConfig c = saew::load_config(config_path);
      if (out_dir) c.out = *out_dir;
      if (run->parsed()) {
        if (trace_bounds) c.trace_bounds = true;
        if (c.algorithm == saew::Algorithm::calibrate) {
          throw saew::ConfigError("algorithm", "use the calibrate subcommand");
        }
      } else {
        c.algorithm = saew::Algorithm::calibrate;
        if (Y) c.Y = *Y;
        if (delta) c.delta = *delta;
        if (budget) c.budget = *budget;
      }
      c.validate();
      return report_run(saew::run_experiment(c));
    }
    if (summarize->parsed()) {
      const auto out = saew::summarize(dir);
      std::cout << out.summary.string() << '\n' << out.scalars.string() << '\n';
      return kExitOk;
    }
    if (plots->parsed()) {
      for (const auto& p : saew::emit_plots(dir)) std::cout << p.string() << '\n';
      return kExitOk;
    }
  } catch (const saew::ConfigError& e) {
    spdlog::error("config error: {}", e.what());
    return kExitConfig;
  } catch (const saew::BudgetExceeded& e) {
    spdlog::error("config error: {}", e.what());
    return kExitConfig;
  } catch (const saew::IoError& e) {
    spdlog::error("i/o error: {}", e.what());
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    spdlog::error("i/o error: {}", e.what());
    return kExitIo;
  } catch (const saew::InvalidInput& e) {
    spdlog::error("invalid input: {}", e.what());
    return kExitConfig;
  }
  return kExitOk;
}
