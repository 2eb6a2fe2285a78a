#include "fbk/errors.hpp"
#include "fbk/harness.hpp"

#include <doctest.h>

#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

using namespace fbk;

namespace {

SweepConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string parse_error(const std::string& text) {
  try {
    parse(text);
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char ch : s) n += ch == '\n';
  return n;
}

SweepConfig small_oracle() {
  return parse(
      "nu = -0.5, 0.5\n"
      "alpha = 1, 2\n"
      "t = 0.05, 0.5\n"
      "xy = 0.2, 0.7\n"
      "envelope = oracle\n");
}

}  // namespace

TEST_CASE("config parsing") {
  const SweepConfig c = parse(
      "# comment line\n"
      "nu = 0, 0.5   # trailing\n"
      "alpha = 2\n"
      "\n"
      "t_range = 0.01, 1, 3\n"
      "xy = 0.1,0.5\n"
      "tol = 1e-9\n"
      "c = 2, 4\n"
      "bracket_heat = 12\n"
      "envelope = longtime\n"
      "kernel = series\n"
      "label = demo run\n");
  CHECK(c.nu_list == std::vector<double>{0.0, 0.5});
  CHECK(c.alpha_list == std::vector<double>{2.0});
  REQUIRE(c.t_grid.size() == 3);
  CHECK(c.t_grid[1] == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(c.xy_grid.size() == 2);
  CHECK(c.tol == 1e-9);
  CHECK(c.c_candidates == std::vector<double>{2.0, 4.0});
  CHECK(c.bracket_heat == 12.0);
  CHECK(c.bracket_subordinated == 50.0);
  CHECK(c.envelope == EnvelopeKind::longtime);
  CHECK(c.route == KernelRoute::series);
  CHECK(c.label == "demo run");
  CHECK(point_count(c) == 2 * 1 * 3 * 4);

  CHECK(parse_error("nu = 0\nalpha = 2\ncolour = blue\n").find("line 3") != std::string::npos);
  CHECK(parse_error("nu = 0\nalpha = two\n").find("line 2") != std::string::npos);
  CHECK(parse_error("nu 0\n").find("line 1") != std::string::npos);
  CHECK(parse_error("envelope = wide\n").find("line 1") != std::string::npos);
  CHECK_THROWS_AS(load_config("/nonexistent/fbk.cfg"), std::exception);
}

TEST_CASE("config validation and the point budget") {
  SweepConfig c = small_oracle();
  CHECK_NOTHROW(validate_config(c));
  c.xy_grid.push_back(1.5);
  CHECK_THROWS_AS(validate_config(c), DomainError);
  c = small_oracle();
  c.alpha_list = {2.5};
  CHECK_THROWS_AS(validate_config(c), DomainError);
  c = small_oracle();
  c.nu_list = {0.0};
  CHECK_THROWS_AS(validate_config(c), DomainError);  // oracle envelope needs +-1/2
  c = small_oracle();
  c.t_grid.clear();
  CHECK_THROWS_AS(validate_config(c), DomainError);

  // 2 * 2 * 1200^2 * 2 points: rejected before any kernel is evaluated
  SweepConfig huge = small_oracle();
  huge.xy_grid = std::vector<double>(1200, 0.5);
  CHECK(point_count(huge) > kPointBudget);
  const auto start = std::chrono::steady_clock::now();
  CHECK_THROWS_AS(run_sweep(huge), DomainError);
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(2));
}

TEST_CASE("log-spaced grids") {
  const std::vector<double> g = log_spaced(0.01, 1.0, 5);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == 0.01);
  CHECK(g.back() == 1.0);
  for (std::size_t i = 1; i < g.size(); ++i) {
    CHECK(g[i] / g[i - 1] == doctest::Approx(std::sqrt(10.0)).epsilon(1e-13));
  }
  CHECK(log_spaced(0.3, 0.3, 1) == std::vector<double>{0.3});
  CHECK_THROWS_AS(log_spaced(0.0, 1.0, 3), DomainError);
  CHECK(log_spaced(1.0, 2.0, 0).empty());
}

TEST_CASE("verdicts and exit codes") {
  for (Verdict v : {Verdict::within, Verdict::violated, Verdict::incomplete}) {
    CHECK(verdict_from_name(verdict_name(v)) == v);
  }
  CHECK(std::string(verdict_name(Verdict::within)) == "WITHIN");
  CHECK(exit_code(Verdict::within) == 0);
  CHECK(exit_code(Verdict::violated) == 2);
  CHECK(exit_code(Verdict::incomplete) == 3);
  CHECK_THROWS_AS(verdict_from_name("MAYBE"), DomainError);
}

TEST_CASE("oracle envelope compares a kernel with itself") {
  const RatioReport r = run_sweep(small_oracle());
  CHECK(r.verdict == Verdict::within);
  CHECK(r.groups.size() == 4);
  CHECK(r.points.size() == point_count(small_oracle()));
  CHECK(r.min_ratio == 1.0);
  CHECK(r.max_ratio == 1.0);
  CHECK(r.c_used == 0.0);
  for (const PointRecord& p : r.points) {
    CHECK(p.ok);
    CHECK(p.ratio_lo == 1.0);
  }
}

TEST_CASE("CSV export") {
  const RatioReport empty;
  const std::string header = "nu,alpha,t,x,y,kernel,env_lo,env_hi,ratio_lo,ratio_hi\n";
  CHECK(report_to_csv(empty) == header);
  const SweepConfig c = small_oracle();
  const std::string csv = report_to_csv(run_sweep(c));
  CHECK(csv.rfind(header, 0) == 0);
  CHECK(count_lines(csv) == point_count(c) + 1);
}

TEST_CASE("JSON summary survives a round trip bit for bit") {
  SweepConfig c = parse(
      "nu = 0, 1\n"
      "alpha = 2, 1\n"
      "t = 0.05, 0.3\n"
      "xy = 0.15, 0.6, 0.9\n"
      "label = round trip\n");
  const RatioReport r = run_sweep(c);
  const nlohmann::json j = report_to_json(r);
  const RatioReport back = report_from_json(nlohmann::json::parse(j.dump()));
  CHECK(back.label == r.label);
  CHECK(back.verdict == r.verdict);
  CHECK(back.min_ratio == r.min_ratio);
  CHECK(back.max_ratio == r.max_ratio);
  CHECK(back.argmin.x == r.argmin.x);
  CHECK(back.argmax.t == r.argmax.t);
  CHECK(back.c_used == r.c_used);
  REQUIRE(back.groups.size() == r.groups.size());
  for (std::size_t i = 0; i < r.groups.size(); ++i) {
    CHECK(back.groups[i].lower_margin == r.groups[i].lower_margin);
    CHECK(back.groups[i].upper_margin == r.groups[i].upper_margin);
    CHECK(back.groups[i].verdict == r.groups[i].verdict);
    CHECK(back.groups[i].c_used == r.groups[i].c_used);
  }
  CHECK(report_to_json(back).dump() == j.dump());
}

TEST_CASE("sweeps are deterministic") {
  const SweepConfig c = parse(
      "nu = 0.3\n"
      "alpha = 2, 0.5\n"
      "t = 0.1, 1\n"
      "xy = 0.2, 0.8\n");
  BasisCache shared;
  const std::string a = report_to_csv(run_sweep(c, shared));
  const std::string b = report_to_csv(run_sweep(c, shared));
  const std::string fresh = report_to_csv(run_sweep(c));
  CHECK(a == b);
  CHECK(a == fresh);
  CHECK(report_to_json(run_sweep(c)).dump() == report_to_json(run_sweep(c)).dump());
}

TEST_CASE("per-point failures mark the sweep incomplete") {
  // the series route refuses t far below its minimum
  const SweepConfig c = parse(
      "nu = 0\n"
      "alpha = 2\n"
      "t = 1e-7, 0.2\n"
      "xy = 0.3, 0.6\n"
      "kernel = series\n"
      "bracket_heat = 1e6\n");
  const RatioReport r = run_sweep(c);
  CHECK(r.verdict == Verdict::incomplete);
  REQUIRE(r.groups.size() == 1);
  CHECK(r.groups[0].failures == 4);
  std::size_t failed = 0;
  for (const PointRecord& p : r.points) {
    if (!p.ok) {
      ++failed;
      CHECK(p.t == 1e-7);
      CHECK_FALSE(p.error.empty());
      CHECK(std::isnan(p.ratio_lo));
    }
  }
  CHECK(failed == 4);
  // a violation elsewhere outranks the missing points
  SweepConfig tight = c;
  tight.bracket_heat = 1.01;
  CHECK(run_sweep(tight).verdict == Verdict::violated);
}

TEST_CASE("export to an unwritable path names the path") {
  const RatioReport r = run_sweep(small_oracle());
  const std::string path = "/nonexistent-dir/report.csv";
  try {
    export_report(r, ReportFormat::csv, path);
    FAIL("export should have thrown");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find(path) != std::string::npos);
  }
}

TEST_CASE("orders without closed forms still produce a report") {
  const SweepConfig c = parse(
      "nu = 0.3, 1.7\n"
      "alpha = 2, 1\n"
      "t = 0.05, 0.5\n"
      "xy = 0.1, 0.5, 0.9\n");
  const RatioReport r = run_sweep(c);
  CHECK(r.groups.size() == 4);
  CHECK(r.points.size() == point_count(c));
  for (const GroupSummary& g : r.groups) {
    CHECK(g.failures == 0);
    CHECK(std::isfinite(g.min_ratio));
    CHECK(g.min_ratio > 0.0);
  }
}
