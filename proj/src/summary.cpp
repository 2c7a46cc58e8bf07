#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "saew/harness.hpp"

namespace saew {
namespace {

namespace fs = std::filesystem;

double quantile_sorted(const std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(const std::string& s, const fs::path& path) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw InvalidInput(path.string() + ": malformed cell '" + s + "'");
  }
  return v;
}

double safe_log(double v) { return std::log(std::max(v, 1e-300)); }

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

Quartiles quartiles(std::vector<double> values) {
  if (values.empty()) throw InvalidInput("quartiles: no values");
  std::sort(values.begin(), values.end());
  Quartiles q;
  q.median = quantile_sorted(values, 0.5);
  q.q1 = quantile_sorted(values, 0.25);
  q.q3 = quantile_sorted(values, 0.75);
  q.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  return q;
}

double loglog_slope(std::span<const std::int64_t> t, std::span<const double> y, std::int64_t t_from,
                    std::int64_t t_to) {
  if (t.size() != y.size()) throw InvalidInput("loglog_slope: length mismatch");
  double n = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < t_from || t[k] > t_to || !(y[k] > 0.0)) continue;
    const double lx = std::log(static_cast<double>(t[k]));
    const double ly = std::log(y[k]);
    n += 1.0;
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (n < 2.0 || den <= 0.0) throw InvalidInput("loglog_slope: need two distinct points");
  return (n * sxy - sx * sy) / den;
}

double linear_fit_r2(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) throw InvalidInput("linear_fit_r2: need >= 3 paired points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (sxx <= 0.0) throw InvalidInput("linear_fit_r2: constant regressor");
  if (syy <= 0.0) return 1.0;
  return sxy * sxy / (sxx * syy);
}

const std::vector<double>& RunTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw InvalidInput("run table has no column " + name);
  return columns[static_cast<std::size_t>(it - header.begin())];
}

RunTable read_run_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  RunTable table;
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput(path.string() + ": empty file");
  table.header = split_csv(line);
  if (table.header.empty() || table.header.front() != "t") throw InvalidInput(path.string() + ": not a run trace");
  table.columns.resize(table.header.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != table.header.size()) throw InvalidInput(path.string() + ": ragged row");
    for (std::size_t k = 0; k < cells.size(); ++k) table.columns[k].push_back(parse_cell(cells[k], path));
    table.t.push_back(static_cast<std::int64_t>(table.columns[0].back()));
  }
  if (table.t.empty()) throw InvalidInput(path.string() + ": no rows");
  return table;
}

RunScalars run_scalars(const std::string& name, const RunTable& run) {
  RunScalars s;
  s.name = name;
  const auto& l2 = run.column("l2_error");
  s.final_log_l2 = safe_log(l2.back());
  s.final_cum_risk = run.column("cum_risk").back();
  const std::int64_t T = run.t.back();
  s.l2_slope = T >= 4 ? loglog_slope(run.t, l2, std::max<std::int64_t>(1, T / 2), T) : 0.0;
  return s;
}

void write_summary_csv(const std::vector<RunTable>& runs, std::ostream& out) {
  if (runs.empty()) throw InvalidInput("write_summary_csv: no runs");
  out << "t,log_l2_median,log_l2_q1,log_l2_q3,log_l2_mean,cum_risk_median,cum_risk_q1,cum_risk_q3,cum_risk_mean\n";
  const std::size_t n = runs.front().t.size();
  std::vector<double> logs(runs.size());
  std::vector<double> cums(runs.size());
  for (std::size_t row = 0; row < n; ++row) {
    for (std::size_t k = 0; k < runs.size(); ++k) {
      logs[k] = safe_log(runs[k].column("l2_error")[row]);
      cums[k] = runs[k].column("cum_risk")[row];
    }
    const Quartiles a = quartiles(logs);
    const Quartiles b = quartiles(cums);
    out << runs.front().t[row] << ',' << format_double(a.median) << ',' << format_double(a.q1) << ','
        << format_double(a.q3) << ',' << format_double(a.mean) << ',' << format_double(b.median) << ','
        << format_double(b.q1) << ',' << format_double(b.q3) << ',' << format_double(b.mean) << '\n';
  }
}

void write_scalars_csv(const std::vector<RunScalars>& scalars, std::ostream& out) {
  out << "run,final_log_l2,final_cum_risk,l2_slope\n";
  for (const auto& s : scalars) {
    out << s.name << ',' << format_double(s.final_log_l2) << ',' << format_double(s.final_cum_risk) << ','
        << format_double(s.l2_slope) << '\n';
  }
}

SummaryOutput summarize(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.rfind("run_seed", 0) == 0 && entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  if (files.empty()) throw InvalidInput("no run_seed*.csv files in " + dir.string());
  std::sort(files.begin(), files.end());

  std::vector<RunTable> runs;
  SummaryOutput out;
  for (const auto& f : files) {
    runs.push_back(read_run_csv(f));
    if (runs.back().header != runs.front().header) throw InvalidInput(f.string() + ": schema differs from " + files.front().string());
    if (runs.back().t != runs.front().t) throw InvalidInput(f.string() + ": time grid differs from " + files.front().string());
    out.runs.push_back(run_scalars(f.stem().string(), runs.back()));
  }

  std::ostringstream summary;
  write_summary_csv(runs, summary);
  out.summary = dir / "summary.csv";
  write_file(out.summary, summary.str());

  std::ostringstream scalars;
  write_scalars_csv(out.runs, scalars);
  out.scalars = dir / "scalars.csv";
  write_file(out.scalars, scalars.str());
  return out;
}

}  // namespace saew
