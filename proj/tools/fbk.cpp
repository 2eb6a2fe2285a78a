// fbk: command-line front end for the Fourier-Bessel kernel library.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fbk/envelopes.hpp"
#include "fbk/harness.hpp"
#include "fbk/kernels.hpp"
#include "fbk/spectrum.hpp"
#include "fbk/transference.hpp"

namespace {

using fbk::Order;

void print_json(const nlohmann::json& j) { std::cout << j.dump(2) << '\n'; }

// shortest text that reads back to the same double
std::string num(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::vector<double> parse_csv_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

int run_zeros(double nu, std::size_t count) {
  const fbk::SpectralBasis basis = fbk::compute_zeros(Order(nu), count);
  std::printf("n,lambda,d_norm\n");
  for (std::size_t n = 1; n <= basis.capacity(); ++n) {
    std::printf("%zu,%s,%s\n", n, num(basis.zero(n)).c_str(), num(basis.normalizer(n)).c_str());
  }
  return 0;
}

int run_kernel(double nu, double alpha, double t, double x, double y, double tol, bool psi,
               const std::string& method) {
  const Order order(nu);
  const bool closed_ok = (nu == 0.5 || nu == -0.5) && (alpha == 1.0 || alpha == 2.0);
  nlohmann::json j;
  if (method == "closed" || (method == "auto" && closed_ok && t < fbk::t_min(alpha))) {
    if (!closed_ok) {
      throw fbk::DomainError("closed forms exist only for nu = +-1/2 and alpha in {1, 2}");
    }
    double value = 0.0;
    double tail = 0.0;
    if (alpha == 1.0) {
      value = fbk::poisson_closed_form(order, t, x, y);
    } else if (t <= 0.25) {
      const fbk::ImageSum s = fbk::heat_closed_form(order, t, x, y, 8);
      value = s.value;
      tail = s.tail_bound;
    } else {
      value = fbk::heat_trig_series(order, t, x, y);
    }
    if (psi) {
      const double w = std::pow(x * y, nu + 0.5);
      value *= w;
      tail *= w;
    }
    j["value"] = value;
    j["terms_used"] = 0;
    j["tail_estimate"] = tail;
    j["method"] = "closed";
  } else {
    fbk::BasisCache cache;
    fbk::SeriesOptions opts;
    opts.psi = psi;
    const fbk::KernelValue v = fbk::evaluate_kernel({order, alpha, t, x, y, tol}, cache, opts);
    j["value"] = v.value;
    j["terms_used"] = v.terms_used;
    j["tail_estimate"] = v.tail_estimate;
    j["method"] = "series";
  }
  print_json(j);
  return 0;
}

int run_kernel_grid(double nu, double alpha, const std::string& xs, const std::string& ys,
                    const std::string& ts, double tol) {
  const std::vector<double> x = parse_csv_list(xs);
  const std::vector<double> y = parse_csv_list(ys);
  const std::vector<double> t = parse_csv_list(ts);
  fbk::BasisCache cache;
  const std::vector<fbk::KernelValue> values =
      fbk::evaluate_kernel_grid(Order(nu), alpha, x, y, t, tol, cache);
  std::printf("x,y,t,value,terms\n");
  for (std::size_t ix = 0; ix < x.size(); ++ix) {
    for (std::size_t iy = 0; iy < y.size(); ++iy) {
      for (std::size_t it = 0; it < t.size(); ++it) {
        const fbk::KernelValue& v = values[(ix * y.size() + iy) * t.size() + it];
        std::printf("%s,%s,%s,%s,%zu\n", num(x[ix]).c_str(), num(y[iy]).c_str(), num(t[it]).c_str(),
                    num(v.value).c_str(), v.terms_used);
      }
    }
  }
  return 0;
}

int run_envelope(double nu, double alpha, double t, double x, double y, double c,
                 const std::string& regime) {
  nlohmann::json j;
  if (regime == "longtime") {
    const double v = fbk::longtime_envelope(Order(nu), alpha, t, x, y);
    j["lower"] = v;
    j["upper"] = v;
    j["c"] = nullptr;
  } else if (alpha == 2.0) {
    const fbk::EnvelopeBounds b = fbk::heat_envelope_interval(Order(nu), t, x, y, c);
    j["lower"] = b.lower;
    j["upper"] = b.upper;
    j["c"] = b.constant_c;
  } else {
    const double v = fbk::subordinated_envelope_interval(Order(nu), alpha, t, x, y);
    j["lower"] = v;
    j["upper"] = v;
    j["c"] = nullptr;
  }
  print_json(j);
  return 0;
}

int run_transfer(double alpha, double t, double x, double y) {
  fbk::BasisCache cache;
  const fbk::TransferencePair p = fbk::interval_transference_check(alpha, t, x, y, cache);
  print_json({{"lhs", p.lhs}, {"rhs", p.rhs}, {"rel_err", p.rel_err}});
  return 0;
}

int run_sweep_cmd(const std::string& config_path, const std::string& out,
                  const std::string& format) {
  const fbk::SweepConfig config = fbk::load_config(config_path);
  fbk::validate_config(config);
  const fbk::RatioReport report = fbk::run_sweep(config);
  const fbk::ReportFormat fmt =
      format == "json" ? fbk::ReportFormat::json : fbk::ReportFormat::csv;
  if (out.empty()) {
    if (fmt == fbk::ReportFormat::csv) {
      std::cout << fbk::report_to_csv(report);
    } else {
      std::cout << fbk::report_to_json(report).dump(2) << '\n';
    }
  } else {
    fbk::export_report(report, fmt, out);
  }
  for (const fbk::GroupSummary& g : report.groups) {
    std::fprintf(stderr,
                 "nu=%g alpha=%g points=%zu failures=%zu c=%g ratio=[%.6g, %.6g] verdict=%s\n",
                 g.nu, g.alpha, g.points, g.failures, g.c_used, g.min_ratio, g.max_ratio,
                 fbk::verdict_name(g.verdict));
  }
  std::fprintf(stderr, "overall verdict: %s\n", fbk::verdict_name(report.verdict));
  return fbk::exit_code(report.verdict);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fourier-Bessel heat and subordinated kernels on (0,1)"};
  app.require_subcommand(1);

  double nu = 0.0, alpha = 2.0, t = 1.0, x = 0.5, y = 0.5, tol = 1e-10, c = 2.0;
  std::size_t count = 10;
  bool psi = false;
  std::string method = "auto", regime = "interval";
  std::string xs, ys, ts, config_path, out, format = "csv";

  CLI::App* zeros = app.add_subcommand("zeros", "positive zeros of J_nu with normalizers (CSV)");
  zeros->add_option("--nu", nu, "Bessel order nu > -1")->required();
  zeros->add_option("--count", count, "number of zeros")->required()->check(CLI::PositiveNumber);

  CLI::App* kernel = app.add_subcommand("kernel", "kernel value G_t(x, y) (JSON)");
  kernel->add_option("--nu", nu)->required();
  kernel->add_option("--alpha", alpha)->required();
  kernel->add_option("--t", t)->required();
  kernel->add_option("--x", x)->required();
  kernel->add_option("--y", y)->required();
  kernel->add_option("--tol", tol, "relative tolerance")->capture_default_str();
  kernel->add_flag("--psi", psi, "multiply by (xy)^{nu+1/2}");
  kernel->add_option("--method", method, "auto|series|closed")
      ->check(CLI::IsMember({"auto", "series", "closed"}))
      ->capture_default_str();

  CLI::App* grid = app.add_subcommand("kernel-grid", "kernel over a tensor grid (CSV)");
  grid->add_option("--nu", nu)->required();
  grid->add_option("--alpha", alpha)->required();
  grid->add_option("--xs", xs, "comma-separated x values")->required();
  grid->add_option("--ys", ys, "comma-separated y values")->required();
  grid->add_option("--ts", ts, "comma-separated t values")->required();
  grid->add_option("--tol", tol)->capture_default_str();

  CLI::App* env = app.add_subcommand("envelope", "envelope bounds (JSON)");
  env->add_option("--nu", nu)->required();
  env->add_option("--alpha", alpha)->required();
  env->add_option("--t", t)->required();
  env->add_option("--x", x)->required();
  env->add_option("--y", y)->required();
  env->add_option("--c", c, "Gaussian constant for alpha = 2")->capture_default_str();
  env->add_option("--regime", regime, "interval|longtime")
      ->check(CLI::IsMember({"interval", "longtime"}))
      ->capture_default_str();

  CLI::App* transfer =
      app.add_subcommand("transfer-check", "interval kernel vs. d = 1 ball kernel (JSON)");
  transfer->add_option("--alpha", alpha)->required();
  transfer->add_option("--t", t)->required();
  transfer->add_option("--x", x)->required();
  transfer->add_option("--y", y)->required();

  CLI::App* sweep = app.add_subcommand("sweep", "grid sweep against envelopes");
  sweep->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", out, "report path (stdout if omitted)");
  sweep->add_option("--format", format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (zeros->parsed()) return run_zeros(nu, count);
    if (kernel->parsed()) return run_kernel(nu, alpha, t, x, y, tol, psi, method);
    if (grid->parsed()) return run_kernel_grid(nu, alpha, xs, ys, ts, tol);
    if (env->parsed()) return run_envelope(nu, alpha, t, x, y, c, regime);
    if (transfer->parsed()) return run_transfer(alpha, t, x, y);
    if (sweep->parsed()) return run_sweep_cmd(config_path, out, format);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
