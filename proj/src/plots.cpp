#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "saew/harness.hpp"

namespace saew {
namespace {

namespace fs = std::filesystem;

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string header_lines(const std::string& png, const std::string& title) {
  std::ostringstream os;
  os << "set terminal pngcairo size 900,600\n"
     << "set output '" << png << "'\n"
     << "set datafile separator ','\n"
     << "set key left bottom\n"
     << "set grid\n"
     << "set title '" << title << "'\n";
  return os.str();
}

std::vector<fs::path> run_traces(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.rfind("run_seed", 0) == 0 && entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

bool emit_staircase(const fs::path& dir, const std::vector<fs::path>& traces, std::vector<fs::path>& scripts) {
  for (const auto& csv : traces) {
    fs::path meta_path = csv;
    meta_path.replace_extension(".json");
    std::ifstream meta_in(meta_path);
    if (!meta_in) continue;
    nlohmann::json meta;
    try {
      meta = nlohmann::json::parse(meta_in);
    } catch (const nlohmann::json::exception&) {
      throw InvalidInput(meta_path.string() + ": malformed metadata");
    }
    if (!meta.contains("algorithm_state") || !meta["algorithm_state"].contains("session_starts")) continue;
    const auto& state = meta["algorithm_state"];
    const double U = state.at("params").at("U").get<double>();
    const auto starts = state.at("session_starts").get<std::vector<std::int64_t>>();

    const RunTable run = read_run_csv(csv);
    const auto& eps = run.column("epsilon");
    const auto& session = run.column("session");
    const auto& l2 = run.column("l2_error");
    const bool with_bound = std::find(run.header.begin(), run.header.end(), "l2_bound") != run.header.end();

    std::ostringstream data;
    data << "t,epsilon,radius,l2_error" << (with_bound ? ",l2_bound" : "") << '\n';
    for (std::size_t k = 0; k < run.t.size(); ++k) {
      data << run.t[k] << ',' << format_double(eps[k]) << ',' << format_double(U * std::exp2(-0.5 * session[k]))
           << ',' << format_double(l2[k]);
      if (with_bound) data << ',' << format_double(run.column("l2_bound")[k]);
      data << '\n';
    }
    write_file(dir / "sessions.dat", data.str());

    std::ostringstream gp;
    gp << header_lines("sessions.png", "sessions of " + csv.stem().string())
       << "set logscale xy\n"
       << "set xlabel 't'\n"
       << "set ylabel 'radius'\n";
    for (const auto s : starts) {
      gp << "set arrow from " << s << ", graph 0 to " << s << ", graph 1 nohead dashtype 2 lc rgb 'gray'\n";
    }
    gp << "plot 'sessions.dat' using 1:2 skip 1 with lines title 'epsilon', \\\n"
       << "     'sessions.dat' using 1:3 skip 1 with steps title 'session radius', \\\n"
       << "     'sessions.dat' using 1:4 skip 1 with lines title 'l2 error'";
    if (with_bound) gp << ", \\\n     'sessions.dat' using 1:5 skip 1 with lines title 'l2 bound'";
    gp << '\n';
    const fs::path script = dir / "sessions.gp";
    write_file(script, gp.str());
    scripts.push_back(script);
    return true;
  }
  return false;
}

}  // namespace

std::vector<fs::path> emit_plots(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  const auto traces = run_traces(dir);
  if (traces.empty()) throw InvalidInput("no run_seed*.csv files in " + dir.string());
  if (!fs::exists(dir / "summary.csv")) summarize(dir);

  std::vector<fs::path> scripts;

  std::ostringstream l2;
  l2 << header_lines("l2_error.png", "l2 error")
     << "set logscale xy\n"
     << "set xlabel 't'\n"
     << "set ylabel 'l2 error'\n"
     << "plot 'summary.csv' using 1:(exp($3)):(exp($4)) skip 1 with filledcurves fs transparent solid 0.3 "
        "title 'interquartile', \\\n"
     << "     'summary.csv' using 1:(exp($2)) skip 1 with lines lw 2 title 'median'\n";
  write_file(dir / "l2_error.gp", l2.str());
  scripts.push_back(dir / "l2_error.gp");

  std::ostringstream cum;
  cum << header_lines("cum_risk.png", "cumulative excess risk")
      << "set xlabel 't'\n"
      << "set ylabel 'cumulative risk'\n"
      << "plot 'summary.csv' using 1:7:8 skip 1 with filledcurves fs transparent solid 0.3 title 'interquartile', \\\n"
      << "     'summary.csv' using 1:6 skip 1 with lines lw 2 title 'median'\n";
  write_file(dir / "cum_risk.gp", cum.str());
  scripts.push_back(dir / "cum_risk.gp");

  emit_staircase(dir, traces, scripts);
  return scripts;
}

}  // namespace saew
