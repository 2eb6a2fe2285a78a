#include "fbk/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fbk/envelopes.hpp"

namespace fbk {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(const std::string& text, int line) {
  const std::string s = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw DomainError("config line " + std::to_string(line) + ": not a number: '" + s + "'");
  }
  return v;
}

std::vector<double> parse_list(const std::string& text, int line) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item, line));
  return out;
}

bool is_closed_form_case(double nu, double alpha) {
  return (nu == 0.5 || nu == -0.5) && (alpha == 1.0 || alpha == 2.0);
}

double closed_form_kernel(double nu, double alpha, double t, double x, double y) {
  if (alpha == 1.0) return poisson_closed_form(Order(nu), t, x, y);
  return heat_closed_form_auto(Order(nu), t, x, y);
}

void put_number(nlohmann::json& j, const char* key, double v) {
  if (std::isfinite(v)) {
    j[key] = v;
  } else if (std::isnan(v)) {
    j[key] = "nan";
  } else {
    j[key] = v > 0 ? "inf" : "-inf";
  }
}

double get_number(const nlohmann::json& j, const char* key) {
  const nlohmann::json& v = j.at(key);
  if (v.is_number()) return v.get<double>();
  const std::string s = v.get<std::string>();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  throw DomainError(std::string("report field ") + key + " is not a number");
}

nlohmann::json point_json(const GridPoint& p) {
  nlohmann::json j;
  put_number(j, "t", p.t);
  put_number(j, "x", p.x);
  put_number(j, "y", p.y);
  return j;
}

GridPoint point_from(const nlohmann::json& j) {
  return {get_number(j, "t"), get_number(j, "x"), get_number(j, "y")};
}

Verdict worse(Verdict a, Verdict b) {
  auto rank = [](Verdict v) {
    switch (v) {
      case Verdict::violated: return 2;
      case Verdict::incomplete: return 1;
      default: return 0;
    }
  };
  return rank(a) >= rank(b) ? a : b;
}

// Kernel values for one (nu, alpha) group in x, y, t order; NaN marks a
// failure whose message is stored alongside.
void group_kernels(const SweepConfig& config, double nu, double alpha, BasisCache& cache,
                   std::vector<double>& values, std::vector<std::string>& errors) {
  const std::vector<double>& xy = config.xy_grid;
  const std::vector<double>& ts = config.t_grid;
  const std::size_t n = xy.size();
  const std::size_t nt = ts.size();
  values.assign(n * n * nt, std::numeric_limits<double>::quiet_NaN());
  errors.assign(n * n * nt, "");
  auto slot = [&](std::size_t ix, std::size_t iy, std::size_t it) {
    return (ix * n + iy) * nt + it;
  };
  if (config.route == KernelRoute::automatic && is_closed_form_case(nu, alpha)) {
    for (std::size_t ix = 0; ix < n; ++ix) {
      for (std::size_t iy = 0; iy < n; ++iy) {
        for (std::size_t it = 0; it < nt; ++it) {
          try {
            values[slot(ix, iy, it)] = closed_form_kernel(nu, alpha, ts[it], xy[ix], xy[iy]);
          } catch (const std::exception& e) {
            errors[slot(ix, iy, it)] = e.what();
          }
        }
      }
    }
    return;
  }
  std::vector<double> usable;
  std::vector<std::size_t> usable_index;
  const double floor = t_min(alpha);
  for (std::size_t it = 0; it < nt; ++it) {
    if (ts[it] >= floor) {
      usable.push_back(ts[it]);
      usable_index.push_back(it);
      continue;
    }
    for (std::size_t ix = 0; ix < n; ++ix) {
      for (std::size_t iy = 0; iy < n; ++iy) {
        errors[slot(ix, iy, it)] = "t below the series minimum " + std::to_string(floor);
      }
    }
  }
  if (usable.empty()) return;
  try {
    const std::vector<KernelValue> batch =
        evaluate_kernel_grid(Order(nu), alpha, xy, xy, usable, config.tol, cache);
    for (std::size_t ix = 0; ix < n; ++ix) {
      for (std::size_t iy = 0; iy < n; ++iy) {
        for (std::size_t k = 0; k < usable.size(); ++k) {
          values[slot(ix, iy, usable_index[k])] = batch[(ix * n + iy) * usable.size() + k].value;
        }
      }
    }
  } catch (const std::exception& e) {
    for (std::size_t ix = 0; ix < n; ++ix) {
      for (std::size_t iy = 0; iy < n; ++iy) {
        for (std::size_t k : usable_index) errors[slot(ix, iy, k)] = e.what();
      }
    }
  }
}

struct EnvelopePair {
  double lo;
  double hi;
};

EnvelopePair envelope_at(const SweepConfig& config, double nu, double alpha, double lambda1,
                         double c, double t, double x, double y) {
  switch (config.envelope) {
    case EnvelopeKind::longtime: {
      const double v = longtime_envelope(lambda1, alpha, t, x, y);
      return {v, v};
    }
    case EnvelopeKind::oracle: {
      const double v = closed_form_kernel(nu, alpha, t, x, y);
      return {v, v};
    }
    case EnvelopeKind::interval:
      break;
  }
  if (alpha == 2.0) {
    const EnvelopeBounds b = heat_envelope_interval(Order(nu), t, x, y, c);
    return {b.lower, b.upper};
  }
  const double v = subordinated_envelope_interval(Order(nu), alpha, t, x, y);
  return {v, v};
}

double group_bracket(const SweepConfig& config, double alpha) {
  if (config.envelope == EnvelopeKind::longtime) return config.bracket_longtime;
  if (config.envelope == EnvelopeKind::oracle) return config.bracket_heat;
  return alpha == 2.0 ? config.bracket_heat : config.bracket_subordinated;
}

}  // namespace

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
  if (count == 0) return {};
  if (!(lo > 0.0 && hi >= lo)) throw DomainError("log-spaced grid needs 0 < lo <= hi");
  if (count == 1) return {lo};
  std::vector<double> out(count);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

SweepConfig parse_config(std::istream& in) {
  SweepConfig config;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw DomainError("config line " + std::to_string(line) + ": expected key = value");
    }
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key == "nu") {
      config.nu_list = parse_list(value, line);
    } else if (key == "alpha") {
      config.alpha_list = parse_list(value, line);
    } else if (key == "t") {
      config.t_grid = parse_list(value, line);
    } else if (key == "t_range") {
      const std::vector<double> r = parse_list(value, line);
      if (r.size() != 3 || r[2] < 1 || r[2] != std::floor(r[2])) {
        throw DomainError("config line " + std::to_string(line) +
                          ": t_range expects lo, hi, count");
      }
      config.t_grid = log_spaced(r[0], r[1], static_cast<std::size_t>(r[2]));
    } else if (key == "xy") {
      config.xy_grid = parse_list(value, line);
    } else if (key == "tol") {
      config.tol = parse_number(value, line);
    } else if (key == "c") {
      config.c_candidates = parse_list(value, line);
    } else if (key == "bracket_heat") {
      config.bracket_heat = parse_number(value, line);
    } else if (key == "bracket_subordinated") {
      config.bracket_subordinated = parse_number(value, line);
    } else if (key == "bracket_longtime") {
      config.bracket_longtime = parse_number(value, line);
    } else if (key == "envelope") {
      if (value == "interval") {
        config.envelope = EnvelopeKind::interval;
      } else if (value == "longtime") {
        config.envelope = EnvelopeKind::longtime;
      } else if (value == "oracle") {
        config.envelope = EnvelopeKind::oracle;
      } else {
        throw DomainError("config line " + std::to_string(line) + ": unknown envelope '" +
                          value + "'");
      }
    } else if (key == "kernel") {
      if (value == "auto") {
        config.route = KernelRoute::automatic;
      } else if (value == "series") {
        config.route = KernelRoute::series;
      } else {
        throw DomainError("config line " + std::to_string(line) + ": unknown kernel route '" +
                          value + "'");
      }
    } else if (key == "label") {
      config.label = value;
    } else {
      throw DomainError("config line " + std::to_string(line) + ": unknown key '" + key + "'");
    }
  }
  return config;
}

SweepConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  return parse_config(in);
}

std::size_t point_count(const SweepConfig& config) {
  // Computed in floating point so absurd grids cannot wrap around.
  const double n = static_cast<double>(config.nu_list.size()) *
                   static_cast<double>(config.alpha_list.size()) *
                   static_cast<double>(config.t_grid.size()) *
                   static_cast<double>(config.xy_grid.size()) *
                   static_cast<double>(config.xy_grid.size());
  return n > 1e18 ? std::numeric_limits<std::size_t>::max() : static_cast<std::size_t>(n);
}

void validate_config(const SweepConfig& config) {
  if (config.nu_list.empty() || config.alpha_list.empty() || config.t_grid.empty() ||
      config.xy_grid.empty()) {
    throw DomainError("sweep grids must be non-empty (nu, alpha, t, xy)");
  }
  const std::size_t count = point_count(config);
  if (count > kPointBudget) {
    throw DomainError("sweep has " + std::to_string(count) + " points, above the budget of " +
                      std::to_string(kPointBudget));
  }
  for (double nu : config.nu_list) {
    if (!(nu > -1.0)) throw DomainError("nu values must exceed -1");
  }
  for (double a : config.alpha_list) {
    if (!(a > 0.0 && a <= 2.0)) throw DomainError("alpha values must lie in (0, 2]");
  }
  for (double t : config.t_grid) {
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("t values must be positive");
  }
  for (double v : config.xy_grid) {
    if (!(v > 0.0 && v < 1.0)) throw DomainError("xy values must lie in (0, 1)");
  }
  if (!(config.tol > 0.0 && config.tol <= 1e-2)) throw DomainError("tol must lie in (0, 1e-2]");
  if (config.c_candidates.empty()) throw DomainError("c candidate list must be non-empty");
  for (double c : config.c_candidates) {
    if (!(c > 1.0)) throw DomainError("c candidates must exceed 1");
  }
  for (double b : {config.bracket_heat, config.bracket_subordinated, config.bracket_longtime}) {
    if (!(b >= 1.0)) throw DomainError("brackets must be at least 1");
  }
  if (config.envelope == EnvelopeKind::oracle) {
    for (double nu : config.nu_list) {
      for (double a : config.alpha_list) {
        if (!is_closed_form_case(nu, a)) {
          throw DomainError("the oracle envelope needs nu = +-1/2 and alpha in {1, 2}");
        }
      }
    }
  }
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::violated: return "VIOLATED";
    case Verdict::incomplete: return "INCOMPLETE";
    default: return "WITHIN";
  }
}

Verdict verdict_from_name(const std::string& name) {
  if (name == "WITHIN") return Verdict::within;
  if (name == "VIOLATED") return Verdict::violated;
  if (name == "INCOMPLETE") return Verdict::incomplete;
  throw DomainError("unknown verdict '" + name + "'");
}

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::violated: return 2;
    case Verdict::incomplete: return 3;
    default: return 0;
  }
}

RatioReport run_sweep(const SweepConfig& config, BasisCache& cache) {
  validate_config(config);
  RatioReport report;
  report.label = config.label;
  const std::vector<double>& xy = config.xy_grid;
  const std::vector<double>& ts = config.t_grid;
  const std::size_t n = xy.size();
  const std::size_t nt = ts.size();
  std::vector<double> cs = config.c_candidates;
  std::sort(cs.begin(), cs.end());
  bool first_group = true;

  for (double nu : config.nu_list) {
    for (double alpha : config.alpha_list) {
      std::vector<double> values;
      std::vector<std::string> errors;
      group_kernels(config, nu, alpha, cache, values, errors);
      const double lambda1 =
          config.envelope == EnvelopeKind::longtime ? bessel_zero(Order(nu), 1) : 0.0;
      const double bracket = group_bracket(config, alpha);
      const bool gaussian = config.envelope == EnvelopeKind::interval && alpha == 2.0;

      // Smallest candidate c meeting both sides; the largest if none does.
      double c_used = gaussian ? cs.back() : 0.0;
      if (gaussian) {
        for (double c : cs) {
          bool fits = true;
          for (std::size_t ix = 0; ix < n && fits; ++ix) {
            for (std::size_t iy = 0; iy < n && fits; ++iy) {
              for (std::size_t it = 0; it < nt && fits; ++it) {
                const double g = values[(ix * n + iy) * nt + it];
                if (std::isnan(g)) continue;
                const EnvelopePair e = envelope_at(config, nu, alpha, 0.0, c, ts[it], xy[ix], xy[iy]);
                fits = g / e.lo >= 1.0 / bracket && g / e.hi <= bracket;
              }
            }
          }
          if (fits) {
            c_used = c;
            break;
          }
        }
      }

      GroupSummary group;
      group.nu = nu;
      group.alpha = alpha;
      group.bracket = bracket;
      group.c_used = c_used;
      group.lower_margin = std::numeric_limits<double>::infinity();
      group.upper_margin = -std::numeric_limits<double>::infinity();
      group.min_ratio = std::numeric_limits<double>::infinity();
      group.max_ratio = -std::numeric_limits<double>::infinity();
      for (std::size_t ix = 0; ix < n; ++ix) {
        for (std::size_t iy = 0; iy < n; ++iy) {
          for (std::size_t it = 0; it < nt; ++it) {
            const std::size_t k = (ix * n + iy) * nt + it;
            PointRecord r;
            r.nu = nu;
            r.alpha = alpha;
            r.t = ts[it];
            r.x = xy[ix];
            r.y = xy[iy];
            r.kernel = values[k];
            ++group.points;
            if (!errors[k].empty()) {
              r.ok = false;
              r.error = errors[k];
              r.env_lo = r.env_hi = r.ratio_lo = r.ratio_hi =
                  std::numeric_limits<double>::quiet_NaN();
              ++group.failures;
              report.points.push_back(r);
              continue;
            }
            try {
              const EnvelopePair e = envelope_at(config, nu, alpha, lambda1, c_used, r.t, r.x, r.y);
              r.env_lo = e.lo;
              r.env_hi = e.hi;
            } catch (const std::exception& ex) {
              r.ok = false;
              r.error = ex.what();
              r.env_lo = r.env_hi = r.ratio_lo = r.ratio_hi =
                  std::numeric_limits<double>::quiet_NaN();
              ++group.failures;
              report.points.push_back(r);
              continue;
            }
            r.ratio_lo = r.kernel / r.env_lo;
            r.ratio_hi = r.kernel / r.env_hi;
            group.lower_margin = std::min(group.lower_margin, r.ratio_lo);
            group.upper_margin = std::max(group.upper_margin, r.ratio_hi);
            const GridPoint here{r.t, r.x, r.y};
            for (double ratio : {r.ratio_lo, r.ratio_hi}) {
              if (ratio < group.min_ratio) {
                group.min_ratio = ratio;
                group.argmin = here;
              }
              if (ratio > group.max_ratio) {
                group.max_ratio = ratio;
                group.argmax = here;
              }
            }
            report.points.push_back(r);
          }
        }
      }
      const bool inside = group.lower_margin >= 1.0 / bracket && group.upper_margin <= bracket;
      const bool any_valid = group.failures < group.points;
      if (any_valid && !inside) {
        group.verdict = Verdict::violated;
      } else if (group.failures > 0) {
        group.verdict = Verdict::incomplete;
      } else {
        group.verdict = Verdict::within;
      }

      if (first_group) {
        report.min_ratio = group.min_ratio;
        report.max_ratio = group.max_ratio;
        report.argmin = group.argmin;
        report.argmax = group.argmax;
        first_group = false;
      }
      if (group.min_ratio < report.min_ratio) {
        report.min_ratio = group.min_ratio;
        report.argmin = group.argmin;
      }
      if (group.max_ratio > report.max_ratio) {
        report.max_ratio = group.max_ratio;
        report.argmax = group.argmax;
      }
      report.c_used = std::max(report.c_used, group.c_used);
      report.verdict = worse(report.verdict, group.verdict);
      report.groups.push_back(group);
    }
  }
  return report;
}

RatioReport run_sweep(const SweepConfig& config) {
  BasisCache cache;
  return run_sweep(config, cache);
}

std::string report_to_csv(const RatioReport& report) {
  std::string out = "nu,alpha,t,x,y,kernel,env_lo,env_hi,ratio_lo,ratio_hi\n";
  char buf[512];
  for (const PointRecord& r : report.points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  r.nu, r.alpha, r.t, r.x, r.y, r.kernel, r.env_lo, r.env_hi, r.ratio_lo,
                  r.ratio_hi);
    out += buf;
  }
  return out;
}

nlohmann::json report_to_json(const RatioReport& report) {
  nlohmann::json j;
  j["label"] = report.label;
  nlohmann::json summary;
  put_number(summary, "min_ratio", report.min_ratio);
  put_number(summary, "max_ratio", report.max_ratio);
  summary["argmin"] = point_json(report.argmin);
  summary["argmax"] = point_json(report.argmax);
  put_number(summary, "c_used", report.c_used);
  summary["verdict"] = verdict_name(report.verdict);
  j["summary"] = summary;
  nlohmann::json groups = nlohmann::json::array();
  for (const GroupSummary& g : report.groups) {
    nlohmann::json o;
    put_number(o, "nu", g.nu);
    put_number(o, "alpha", g.alpha);
    o["points"] = g.points;
    o["failures"] = g.failures;
    put_number(o, "bracket", g.bracket);
    put_number(o, "c_used", g.c_used);
    put_number(o, "lower_margin", g.lower_margin);
    put_number(o, "upper_margin", g.upper_margin);
    put_number(o, "min_ratio", g.min_ratio);
    put_number(o, "max_ratio", g.max_ratio);
    o["argmin"] = point_json(g.argmin);
    o["argmax"] = point_json(g.argmax);
    o["verdict"] = verdict_name(g.verdict);
    groups.push_back(o);
  }
  j["groups"] = groups;
  nlohmann::json points = nlohmann::json::array();
  for (const PointRecord& r : report.points) {
    nlohmann::json o;
    put_number(o, "nu", r.nu);
    put_number(o, "alpha", r.alpha);
    put_number(o, "t", r.t);
    put_number(o, "x", r.x);
    put_number(o, "y", r.y);
    put_number(o, "kernel", r.kernel);
    put_number(o, "env_lo", r.env_lo);
    put_number(o, "env_hi", r.env_hi);
    put_number(o, "ratio_lo", r.ratio_lo);
    put_number(o, "ratio_hi", r.ratio_hi);
    o["ok"] = r.ok;
    if (!r.ok) o["error"] = r.error;
    points.push_back(o);
  }
  j["points"] = points;
  return j;
}

RatioReport report_from_json(const nlohmann::json& j) {
  RatioReport report;
  report.label = j.at("label").get<std::string>();
  const nlohmann::json& s = j.at("summary");
  report.min_ratio = get_number(s, "min_ratio");
  report.max_ratio = get_number(s, "max_ratio");
  report.argmin = point_from(s.at("argmin"));
  report.argmax = point_from(s.at("argmax"));
  report.c_used = get_number(s, "c_used");
  report.verdict = verdict_from_name(s.at("verdict").get<std::string>());
  for (const nlohmann::json& o : j.at("groups")) {
    GroupSummary g;
    g.nu = get_number(o, "nu");
    g.alpha = get_number(o, "alpha");
    g.points = o.at("points").get<std::size_t>();
    g.failures = o.at("failures").get<std::size_t>();
    g.bracket = get_number(o, "bracket");
    g.c_used = get_number(o, "c_used");
    g.lower_margin = get_number(o, "lower_margin");
    g.upper_margin = get_number(o, "upper_margin");
    g.min_ratio = get_number(o, "min_ratio");
    g.max_ratio = get_number(o, "max_ratio");
    g.argmin = point_from(o.at("argmin"));
    g.argmax = point_from(o.at("argmax"));
    g.verdict = verdict_from_name(o.at("verdict").get<std::string>());
    report.groups.push_back(g);
  }
  for (const nlohmann::json& o : j.at("points")) {
    PointRecord r;
    r.nu = get_number(o, "nu");
    r.alpha = get_number(o, "alpha");
    r.t = get_number(o, "t");
    r.x = get_number(o, "x");
    r.y = get_number(o, "y");
    r.kernel = get_number(o, "kernel");
    r.env_lo = get_number(o, "env_lo");
    r.env_hi = get_number(o, "env_hi");
    r.ratio_lo = get_number(o, "ratio_lo");
    r.ratio_hi = get_number(o, "ratio_hi");
    r.ok = o.at("ok").get<bool>();
    if (!r.ok) r.error = o.at("error").get<std::string>();
    report.points.push_back(r);
  }
  return report;
}

void export_report(const RatioReport& report, ReportFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open report file " + path + " for writing");
  if (format == ReportFormat::csv) {
    out << report_to_csv(report);
  } else {
    out << report_to_json(report).dump(2) << '\n';
  }
  out.flush();
  if (!out) throw std::runtime_error("failed writing report file " + path);
}

}  // namespace fbk
