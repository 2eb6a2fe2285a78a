#include "fbk/transference.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace fbk {

namespace {

constexpr double kSqrtPi = 1.77245385090551602730;

double gauss(double u, double t) {
  return std::exp(-u * u / (4.0 * t)) / std::sqrt(4.0 * kPi * t);
}

// Each image beyond |j| = J sits at least 4|j| - 4 from the target.
double ball_image_tail(double t, int J) {
  double total = 0.0;
  for (int j = J + 1; j < J + 400; ++j) {
    const double term = gauss(4.0 * j - 4.0, t);
    total += term;
    if (term == 0.0 || term < 1e-20 * total) break;
  }
  return 4.0 * total;  // two sides, two images per shift
}

}  // namespace

double sphere_area(int d) {
  if (d < 1) throw DomainError("sphere_area: dimension must be at least 1");
  return 2.0 * std::pow(kPi, 0.5 * d) / gamma_fn(0.5 * d);
}

QuadratureResult zonal_integral(const SphereIntegrand& f, double rel_tol) {
  const int d = f.dimension;
  if (d < 1) throw DomainError("zonal_integral: dimension must be at least 1");
  if (d == 1) {
    // S^0 = {-1, +1} with counting measure.
    return {f.profile(-1.0) + f.profile(1.0), 0.0, 0, true};
  }
  auto integrand = [&](double th) {
    return f.profile(std::cos(th)) * std::pow(std::sin(th), d - 2);
  };
  std::array<double, 9> breaks{};
  for (int i = 0; i <= 8; ++i) breaks[static_cast<std::size_t>(i)] = kPi * i / 8.0;
  QuadratureResult r = integrate_adaptive(integrand, breaks, rel_tol, 0.0, 8000);
  if (!r.converged) {
    throw ConvergenceError("zonal quadrature reached error estimate " + std::to_string(r.error));
  }
  const double scale = sphere_area(d - 1);
  r.value *= scale;
  r.error *= scale;
  return r;
}

QuadratureResult gaussian_sphere_quadrature(int d, double x, double y, double t, double c) {
  if (!(x >= 0.0 && y >= 0.0 && t > 0.0 && c > 0.0)) {
    throw DomainError("gaussian sphere integral needs x, y >= 0 and t, c > 0");
  }
  const double ct = c * t;
  SphereIntegrand f{d, [=](double xi) {
                      // |x e_1 - y xi|^2 = x^2 + y^2 - 2 x y xi_1
                      return std::exp(-(x * x + y * y - 2.0 * x * y * xi) / ct);
                    }};
  return zonal_integral(f);
}

double gaussian_sphere_closed(int d, double x, double y, double t, double c) {
  if (d < 1) throw DomainError("gaussian_sphere_closed: dimension must be at least 1");
  if (!(x >= 0.0 && y >= 0.0 && t > 0.0 && c > 0.0)) {
    throw DomainError("gaussian_sphere_closed needs x, y >= 0 and t, c > 0");
  }
  const double nu = 0.5 * d - 1.0;
  const double ct = c * t;
  const double z = 2.0 * x * y / ct;
  const double lead = std::pow(2.0 * kPi, nu + 1.0);
  if (z == 0.0) {
    // z^{-nu} I_nu(z) -> 1 / (2^nu Gamma(nu+1))
    return lead * std::exp(-(x * x + y * y) / ct) / (std::pow(2.0, nu) * gamma_fn(nu + 1.0));
  }
  const ScaledValue i = bessel_i_scaled(Order(nu), z);
  // e^{-(x^2+y^2)/(ct)} e^{z} = e^{-(x-y)^2/(ct)}
  return lead * i.mantissa *
         std::exp(-(x - y) * (x - y) / ct - nu * std::log(z) + (i.log_scale - z));
}

double schlafli_bessel_i(Order nu, double z) {
  const double v = nu.value();
  if (!(v > -0.5)) throw DomainError("the Schlafli representation needs nu > -1/2");
  if (!(z > 0.0)) throw DomainError("schlafli_bessel_i needs z > 0");
  // e^{z cos th} = e^{z} e^{z (cos th - 1)}; the scaled integrand stays <= 1.
  auto integrand = [&](double th) {
    return std::exp(z * (std::cos(th) - 1.0)) * std::pow(std::sin(th), 2.0 * v);
  };
  std::vector<double> breaks = graded_breakpoints(0.0, kPi, std::min(0.05, 1.0 / z));
  const QuadratureResult r = integrate_adaptive(integrand, breaks, 1e-14, 0.0, 20000);
  const double log_pref = v * std::log(z) - std::log(kSqrtPi) - v * std::log(2.0) -
                          log_gamma(v + 0.5) + z;
  return r.value * std::exp(log_pref);
}

int ball_image_count(double t) {
  int J = std::max(8, static_cast<int>(std::ceil(4.0 / std::sqrt(t))));
  while (ball_image_tail(t, J) > 1e-17 * gauss(0.0, t) && J < 100000) J *= 2;
  return J;
}

ImageSum ball_heat_kernel_d1(double t, double x, double y) {
  if (!(t > 0.0)) throw DomainError("ball kernel: t must be positive");
  if (!(std::fabs(x) <= 1.0 && std::fabs(y) <= 1.0)) {
    throw DomainError("ball kernel: points must lie in [-1, 1]");
  }
  const int J = ball_image_count(t);
  double sum = 0.0;
  double comp = 0.0;
  auto add = [&](double v) {
    const double s = sum + v;
    comp += std::fabs(sum) >= std::fabs(v) ? (sum - s) + v : (v - s) + sum;
    sum = s;
  };
  for (int j = -J; j <= J; ++j) {
    add(gauss(x - y + 4.0 * j, t));
    add(-gauss(x + y - 2.0 + 4.0 * j, t));
  }
  return {sum + comp, ball_image_tail(t, J)};
}

double ball_kernel_d1(double alpha, double t, double x, double y) {
  if (alpha == 2.0) return ball_heat_kernel_d1(t, x, y).value;
  if (alpha != 1.0) throw DomainError("ball_kernel_d1 supports alpha in {1, 2}");
  if (!(t > 0.0)) throw DomainError("ball kernel: t must be positive");
  // First Dirichlet eigenvalue of (-1, 1) is (pi/2)^2.
  const double lambda1 = 0.5 * kPi;
  auto integrand = [&](double u) {
    const double s = std::exp(u);
    return t / (2.0 * kSqrtPi) / std::sqrt(s) * std::exp(-t * t / (4.0 * s)) *
           ball_heat_kernel_d1(s, x, y).value;
  };
  const double lo = std::log(t * t / 400.0);
  const double hi = std::log((t * lambda1 + 40.0) / (lambda1 * lambda1));
  std::vector<double> breaks;
  for (int i = 0; i <= 24; ++i) breaks.push_back(lo + (hi - lo) * i / 24.0);
  const QuadratureResult r = integrate_adaptive(integrand, breaks, 1e-11, 1e-18, 20000);
  if (!r.converged) {
    throw ConvergenceError("ball subordination reached error estimate " +
                           std::to_string(r.error));
  }
  return r.value;
}

TransferencePair interval_transference_check(double alpha, double t, double x, double y,
                                             BasisCache& cache) {
  if (alpha != 1.0 && alpha != 2.0) {
    throw DomainError("the d = 1 transference check supports alpha in {1, 2}");
  }
  KernelQuery q{Order(-0.5), alpha, t, x, y, 1e-13};
  const double lhs = evaluate_kernel(q, cache).value;
  const double rhs = ball_kernel_d1(alpha, t, x, y) + ball_kernel_d1(alpha, t, x, -y);
  const double rel = lhs != 0.0 ? std::fabs(lhs - rhs) / std::fabs(lhs) : std::fabs(rhs);
  return {lhs, rhs, rel};
}

double ball_inner_product(int d, const std::function<double(std::span<const double>)>& F,
                          const std::function<double(std::span<const double>)>& G,
                          int points) {
  if (d < 1) throw DomainError("ball_inner_product: dimension must be at least 1");
  const GaussLegendreRule& rule = gauss_legendre(points);
  std::vector<double> p(static_cast<std::size_t>(d));
  if (d == 1) {
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      p[0] = rule.nodes[i];
      sum += rule.weights[i] * F(p) * G(p);
    }
    return sum;
  }
  // Coordinates (r, th_1, ..., th_{d-2} in [0, pi], th_{d-1} in [0, 2 pi]).
  const int dims = d;
  std::vector<int> idx(static_cast<std::size_t>(dims), 0);
  const std::size_t m = rule.nodes.size();
  auto node = [&](int coord, std::size_t i) {
    const double u = 0.5 * (rule.nodes[i] + 1.0);
    if (coord == 0) return u;
    if (coord == dims - 1) return 2.0 * kPi * u;
    return kPi * u;
  };
  auto span_len = [&](int coord) {
    if (coord == 0) return 1.0;
    if (coord == dims - 1) return 2.0 * kPi;
    return kPi;
  };
  double total = 0.0;
  for (;;) {
    double w = 1.0;
    double r = node(0, static_cast<std::size_t>(idx[0]));
    double jac = std::pow(r, d - 1);
    double radial = r;
    for (int k = 0; k < dims; ++k) w *= 0.5 * span_len(k) * rule.weights[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])];
    for (int k = 1; k < dims; ++k) {
      const double th = node(k, static_cast<std::size_t>(idx[static_cast<std::size_t>(k)]));
      p[static_cast<std::size_t>(k - 1)] = radial * std::cos(th);
      radial *= std::sin(th);
      if (k < dims - 1) jac *= std::pow(std::sin(th), d - 1 - k);
    }
    p[static_cast<std::size_t>(d - 1)] = radial;
    total += w * jac * F(p) * G(p);
    int k = 0;
    while (k < dims && ++idx[static_cast<std::size_t>(k)] == static_cast<int>(m)) {
      idx[static_cast<std::size_t>(k)] = 0;
      ++k;
    }
    if (k == dims) break;
  }
  return total;
}

}  // namespace fbk
