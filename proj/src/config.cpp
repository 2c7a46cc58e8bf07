#include "saew/config.hpp"

#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace saew {
namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "loss",  "d",     "d0",        "noise_sd",     "alpha_q", "design", "clip",   "noise_clip",
      "seed",  "seeds", "algorithm", "T",            "out",     "trace_bounds", "risk_eval", "threads",
      "alpha", "U",     "B",         "delta",        "saew_d0", "gamma",  "rho",    "lambda",
      "Y",     "budget"};
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto s = trim(text);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError(key, "expected a finite number, got '" + text + "'");
  }
  return v;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const auto s = trim(text);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ConfigError(key, "expected a nonnegative integer, got '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const auto s = trim(text);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(key, "expected true or false, got '" + text + "'");
}

// "1,2,5" or "1..30" or a mix of both
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_unsigned("seeds", item));
      continue;
    }
    const auto lo = parse_unsigned("seeds", item.substr(0, dots));
    const auto hi = parse_unsigned("seeds", item.substr(dots + 2));
    if (hi < lo) throw ConfigError("seeds", "empty range '" + item + "'");
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
  }
  if (out.empty()) throw ConfigError("seeds", "at least one seed is required");
  return out;
}

}  // namespace

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::saew:
      return "saew";
    case Algorithm::eg:
      return "eg";
    case Algorithm::rda:
      return "rda";
    case Algorithm::calibrate:
      return "calibrate";
  }
  return "unknown";
}

const char* to_string(RiskEval r) { return r == RiskEval::exact ? "exact" : "holdout"; }

std::size_t ExperimentConfig::parameter_dimension() const { return loss == LossFamily::quantile ? d + 1 : d; }

std::size_t ExperimentConfig::effective_saew_d0() const {
  if (saew_d0 != 0) return saew_d0;
  return loss == LossFamily::quantile ? d0 + 1 : d0;
}

void ExperimentConfig::validate() const {
  if (d < 1) throw ConfigError("d", "must be >= 1");
  if (d0 < 1 || d0 > d) throw ConfigError("d0", "must satisfy 1 <= d0 <= d");
  if (!(noise_sd >= 0.0)) throw ConfigError("noise_sd", "must be >= 0");
  if (!(alpha_q > 0.0 && alpha_q < 1.0)) throw ConfigError("alpha_q", "must lie in (0,1)");
  if (!(clip > 0.0)) throw ConfigError("clip", "must be > 0");
  if (!(noise_clip > 0.0)) throw ConfigError("noise_clip", "must be > 0");
  if (design == Design::truncated && loss != LossFamily::square) {
    throw ConfigError("design", "the truncated design is only available for the square loss");
  }
  if (seeds.empty()) throw ConfigError("seeds", "at least one seed is required");
  if (T < 1) throw ConfigError("T", "must be >= 1");
  if (out.empty()) throw ConfigError("out", "must not be empty");
  if (!(alpha > 0.0)) throw ConfigError("alpha", "must be > 0");
  if (!(U > 0.0)) throw ConfigError("U", "must be > 0");
  if (!(B > 0.0)) throw ConfigError("B", "must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta", "must lie in (0,1)");
  if (effective_saew_d0() > parameter_dimension()) throw ConfigError("saew_d0", "exceeds the parameter dimension");
  if (!(gamma > 0.0)) throw ConfigError("gamma", "must be > 0");
  if (!(rho >= 0.0)) throw ConfigError("rho", "must be >= 0");
  if (!(lambda >= 0.0)) throw ConfigError("lambda", "must be >= 0");
  if (!(Y > 0.0)) throw ConfigError("Y", "must be > 0");
  if (algorithm == Algorithm::calibrate && loss != LossFamily::square) {
    throw ConfigError("algorithm", "calibrate requires loss = square");
  }
  if (risk_eval == RiskEval::holdout && loss != LossFamily::quantile) {
    throw ConfigError("risk_eval", "holdout evaluation only applies to loss = quantile");
  }
}

ExperimentConfig parse_config(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("<file>", std::string("malformed config: ") + e.message());
  }
  ExperimentConfig c;
  for (const auto& [key, node] : tree) {
    if (!node.empty()) throw ConfigError(key, "sections are not supported; use flat key = value lines");
    if (!known_keys().count(key)) throw ConfigError(key, "unknown key");
    const std::string v = trim(node.data());
    if (key == "loss") {
      if (v == "square") {
        c.loss = LossFamily::square;
      } else if (v == "quantile") {
        c.loss = LossFamily::quantile;
      } else {
        throw ConfigError(key, "expected square or quantile, got '" + v + "'");
      }
    } else if (key == "design") {
      if (v == "gaussian") {
        c.design = Design::gaussian;
      } else if (v == "truncated") {
        c.design = Design::truncated;
      } else {
        throw ConfigError(key, "expected gaussian or truncated, got '" + v + "'");
      }
    } else if (key == "algorithm") {
      if (v == "saew") {
        c.algorithm = Algorithm::saew;
      } else if (v == "eg") {
        c.algorithm = Algorithm::eg;
      } else if (v == "rda") {
        c.algorithm = Algorithm::rda;
      } else if (v == "calibrate") {
        c.algorithm = Algorithm::calibrate;
      } else {
        throw ConfigError(key, "expected saew, eg, rda or calibrate, got '" + v + "'");
      }
    } else if (key == "risk_eval") {
      if (v == "exact") {
        c.risk_eval = RiskEval::exact;
      } else if (v == "holdout") {
        c.risk_eval = RiskEval::holdout;
      } else {
        throw ConfigError(key, "expected exact or holdout, got '" + v + "'");
      }
    } else if (key == "d") {
      c.d = parse_unsigned(key, v);
    } else if (key == "d0") {
      c.d0 = parse_unsigned(key, v);
    } else if (key == "noise_sd") {
      c.noise_sd = parse_real(key, v);
    } else if (key == "alpha_q") {
      c.alpha_q = parse_real(key, v);
    } else if (key == "clip") {
      c.clip = parse_real(key, v);
    } else if (key == "noise_clip") {
      c.noise_clip = parse_real(key, v);
    } else if (key == "seed") {
      c.seed = parse_unsigned(key, v);
    } else if (key == "seeds") {
      c.seeds = parse_seeds(v);
    } else if (key == "T") {
      c.T = static_cast<std::int64_t>(parse_unsigned(key, v));
    } else if (key == "out") {
      c.out = v;
    } else if (key == "trace_bounds") {
      c.trace_bounds = parse_bool(key, v);
    } else if (key == "threads") {
      c.threads = static_cast<unsigned>(parse_unsigned(key, v));
    } else if (key == "alpha") {
      c.alpha = parse_real(key, v);
    } else if (key == "U") {
      c.U = parse_real(key, v);
    } else if (key == "B") {
      c.B = parse_real(key, v);
    } else if (key == "delta") {
      c.delta = parse_real(key, v);
    } else if (key == "saew_d0") {
      c.saew_d0 = parse_unsigned(key, v);
    } else if (key == "gamma") {
      c.gamma = parse_real(key, v);
    } else if (key == "rho") {
      c.rho = parse_real(key, v);
    } else if (key == "lambda") {
      c.lambda = parse_real(key, v);
    } else if (key == "Y") {
      c.Y = parse_real(key, v);
    } else if (key == "budget") {
      c.budget = parse_unsigned(key, v);
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  return parse_config(in);
}

std::string to_ini(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "loss = " << to_string(c.loss) << '\n'
     << "d = " << c.d << '\n'
     << "d0 = " << c.d0 << '\n'
     << "noise_sd = " << format_double(c.noise_sd) << '\n'
     << "alpha_q = " << format_double(c.alpha_q) << '\n'
     << "design = " << to_string(c.design) << '\n'
     << "clip = " << format_double(c.clip) << '\n'
     << "noise_clip = " << format_double(c.noise_clip) << '\n'
     << "seed = " << c.seed << '\n'
     << "seeds = ";
  for (std::size_t k = 0; k < c.seeds.size(); ++k) os << (k ? "," : "") << c.seeds[k];
  os << '\n'
     << "algorithm = " << to_string(c.algorithm) << '\n'
     << "T = " << c.T << '\n'
     << "out = " << c.out << '\n'
     << "trace_bounds = " << (c.trace_bounds ? "true" : "false") << '\n'
     << "risk_eval = " << to_string(c.risk_eval) << '\n'
     << "threads = " << c.threads << '\n'
     << "alpha = " << format_double(c.alpha) << '\n'
     << "U = " << format_double(c.U) << '\n'
     << "B = " << format_double(c.B) << '\n'
     << "delta = " << format_double(c.delta) << '\n'
     << "saew_d0 = " << c.saew_d0 << '\n'
     << "gamma = " << format_double(c.gamma) << '\n'
     << "rho = " << format_double(c.rho) << '\n'
     << "lambda = " << format_double(c.lambda) << '\n'
     << "Y = " << format_double(c.Y) << '\n'
     << "budget = " << c.budget << '\n';
  return os.str();
}

std::string config_hash(const ExperimentConfig& c) {
  // Where results go and how many threads compute them do not change them.
  ExperimentConfig key = c;
  key.out = "-";
  key.threads = 0;
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : to_ini(key)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace saew
