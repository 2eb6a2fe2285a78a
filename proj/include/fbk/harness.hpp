#pragma once

// Grid sweeps comparing kernels against their envelopes, with CSV/JSON reports.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbk/kernels.hpp"

namespace fbk {

/// interval: the short-time envelopes (Gaussian pair for alpha = 2, the
/// subordinated expression for alpha < 2); longtime: (1-x)(1-y) e^{-t lambda_1^alpha};
/// oracle: the nu = +-1/2 closed form itself.
enum class EnvelopeKind { interval, longtime, oracle };

enum class KernelRoute { automatic, series };

struct SweepConfig {
  std::vector<double> nu_list;
  std::vector<double> alpha_list;
  std::vector<double> t_grid;
  std::vector<double> xy_grid;
  double tol = 1e-8;
  std::vector<double> c_candidates = {1.1, 1.5, 2.0, 4.0, 8.0, 10.0};
  double bracket_heat = 10.0;
  double bracket_subordinated = 50.0;
  double bracket_longtime = 50.0;
  EnvelopeKind envelope = EnvelopeKind::interval;
  KernelRoute route = KernelRoute::automatic;
  std::string label;
};

inline constexpr std::size_t kPointBudget = 10'000'000;

/// Parses `key = value` lines; lists are comma separated, `#` starts a comment.
/// t may be given as `t = a, b, ...` or `t_range = lo, hi, count` (log-spaced).
SweepConfig parse_config(std::istream& in);
SweepConfig load_config(const std::string& path);

/// Throws DomainError for empty grids, out-of-domain values, or a point count
/// above kPointBudget.
void validate_config(const SweepConfig& config);
std::size_t point_count(const SweepConfig& config);

/// Log-spaced grid of `count` points on [lo, hi].
std::vector<double> log_spaced(double lo, double hi, std::size_t count);

enum class Verdict { within, violated, incomplete };
const char* verdict_name(Verdict v);
Verdict verdict_from_name(const std::string& name);
int exit_code(Verdict v);

struct PointRecord {
  double nu = 0.0;
  double alpha = 0.0;
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double kernel = 0.0;
  double env_lo = 0.0;
  double env_hi = 0.0;
  double ratio_lo = 0.0;
  double ratio_hi = 0.0;
  bool ok = true;
  std::string error;
};

struct GridPoint {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
};

struct GroupSummary {
  double nu = 0.0;
  double alpha = 0.0;
  std::size_t points = 0;
  std::size_t failures = 0;
  double bracket = 0.0;
  double c_used = 0.0;  // 0 when no Gaussian constant applies
  double lower_margin = 0.0;  // min of kernel / env_lo, compared with 1/bracket
  double upper_margin = 0.0;  // max of kernel / env_hi, compared with bracket
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  GridPoint argmin;
  GridPoint argmax;
  Verdict verdict = Verdict::within;
};

struct RatioReport {
  std::string label;
  std::vector<PointRecord> points;
  std::vector<GroupSummary> groups;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  GridPoint argmin;
  GridPoint argmax;
  double c_used = 0.0;
  Verdict verdict = Verdict::within;
};

/// Sweep in the fixed order nu, alpha, x, y, t. Per-point failures are
/// recorded and downgrade the verdict to incomplete.
RatioReport run_sweep(const SweepConfig& config, BasisCache& cache);
RatioReport run_sweep(const SweepConfig& config);

enum class ReportFormat { csv, json };

std::string report_to_csv(const RatioReport& report);
nlohmann::json report_to_json(const RatioReport& report);
RatioReport report_from_json(const nlohmann::json& j);

/// Writes the report; I/O failures raise std::runtime_error naming the path.
void export_report(const RatioReport& report, ReportFormat format, const std::string& path);

}  // namespace fbk
