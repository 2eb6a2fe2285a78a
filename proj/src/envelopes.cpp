#include "fbk/envelopes.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fbk/quadrature.hpp"
#include "fbk/spectrum.hpp"

namespace fbk {

namespace {

void check_unit(double x, double y) {
  if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0)) {
    throw DomainError("x and y must lie in [0, 1]");
  }
}

// (xy)^{-p} (xy/scale ^ 1)^{p}, finite as xy -> 0.
double weight_factor(double p, double xy, double scale) {
  return xy < scale ? std::pow(scale, -p) : std::pow(xy, -p);
}

void check_lemma(double gamma, double eta, double A, double B, double D) {
  if (!(gamma > eta + 1.0 && eta + 1.0 > 0.0)) {
    throw DomainError("lemma integral needs gamma > eta + 1 > 0");
  }
  if (!(0.0 < B && B < A && A < D)) throw DomainError("lemma integral needs 0 < B < A < D");
}

}  // namespace

EnvelopeBounds heat_envelope_interval(Order nu, double t, double x, double y, double c) {
  if (!(t > 0.0)) throw DomainError("envelope: t must be positive");
  if (!(c > 1.0)) throw DomainError("envelope: c must exceed 1");
  check_unit(x, y);
  const double p = nu.value() + 0.5;
  const double base = weight_factor(p, x * y, t) * std::min((1.0 - x) * (1.0 - y) / t, 1.0) /
                      std::sqrt(t);
  const double d2 = (x - y) * (x - y);
  return {base * std::exp(-c * d2 / t), base * std::exp(-d2 / (c * t)), c};
}

double subordinated_envelope_interval(Order nu, double alpha, double t, double x, double y) {
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw DomainError("subordinated envelope needs 0 < alpha < 2; use the heat envelope");
  }
  if (!(t > 0.0)) throw DomainError("envelope: t must be positive");
  check_unit(x, y);
  const double p = nu.value() + 0.5;
  const double r = std::pow(t, 2.0 / alpha) + (x - y) * (x - y);
  return weight_factor(p, x * y, r) * std::min((1.0 - x) * (1.0 - y) / r, 1.0) * t /
         std::pow(r, 0.5 * (alpha + 1.0));
}

double longtime_envelope(double lambda1, double alpha, double t, double x, double y) {
  check_unit(x, y);
  // Factor before exponentiating so (1-x)(1-y) = 0 stays exactly 0.
  const double boundary = (1.0 - x) * (1.0 - y);
  if (boundary == 0.0) return 0.0;
  return std::exp(std::log(boundary) - t * std::pow(lambda1, alpha));
}

double longtime_envelope(Order nu, double alpha, double t, double x, double y) {
  return longtime_envelope(bessel_zero(nu, 1), alpha, t, x, y);
}

EnvelopeBounds ball_envelopes(int d, double alpha, double t, double norm_x, double norm_y,
                              double dist, double c) {
  if (d < 1) throw DomainError("ball dimension must be at least 1");
  if (!(t > 0.0)) throw DomainError("envelope: t must be positive");
  if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("alpha must lie in (0, 2]");
  const double slack = 1e-12;
  if (!(norm_x >= 0.0 && norm_x <= 1.0 && norm_y >= 0.0 && norm_y <= 1.0 && dist >= 0.0) ||
      dist < std::fabs(norm_x - norm_y) - slack || dist > norm_x + norm_y + slack) {
    throw DomainError("inconsistent ball geometry |x| = " + std::to_string(norm_x) +
                      ", |y| = " + std::to_string(norm_y) + ", |x-y| = " + std::to_string(dist));
  }
  const double boundary = (1.0 - norm_x) * (1.0 - norm_y);
  if (alpha == 2.0) {
    if (!(c > 1.0)) throw DomainError("envelope: c must exceed 1");
    const double base = std::min(boundary / t, 1.0) * std::pow(t, -0.5 * d);
    const double d2 = dist * dist;
    return {base * std::exp(-c * d2 / t), base * std::exp(-d2 / (c * t)), c};
  }
  const double r = std::pow(t, 2.0 / alpha) + dist * dist;
  const double value = std::min(boundary / r, 1.0) * t / std::pow(r, 0.5 * (d + alpha));
  return {value, value, 1.0};
}

double rough_ball_bound(int d, double t, double dist) {
  if (d < 1 || !(t > 0.0)) throw DomainError("rough bound needs d >= 1 and t > 0");
  return std::pow(4.0 * kPi * t, -0.5 * d) * std::exp(-dist * dist / (4.0 * t));
}

double lemma_int_estimate(double gamma, double eta, double A, double B, double D) {
  check_lemma(gamma, eta, A, B, D);
  return 1.0 / ((D - B) * std::pow(A, eta + 1.0) * std::pow(A - B, gamma - eta - 1.0));
}

double lemma_int_quadrature(double gamma, double eta, double A, double B, double D) {
  check_lemma(gamma, eta, A, B, D);
  // Both halves are written in u = 1 -+ s and then u = v^{1/(eta+1)}, which
  // absorbs the endpoint factor u^eta: u^eta du = dv / (eta + 1).
  const double p = 1.0 / (eta + 1.0);
  auto half = [&](double dd, double aa, double b_sign, std::vector<double> u_breaks) {
    auto f = [&](double v) {
      const double u = std::pow(v, p);
      return p * std::pow(2.0 - u, eta) /
             ((dd + b_sign * B * u) * std::pow(aa + b_sign * B * u, gamma));
    };
    std::vector<double> v_breaks;
    for (double u : u_breaks) {
      if (u > 0.0 && u < 1.0) v_breaks.push_back(std::pow(u, eta + 1.0));
    }
    v_breaks.push_back(0.0);
    v_breaks.push_back(1.0);
    std::sort(v_breaks.begin(), v_breaks.end());
    v_breaks.erase(std::unique(v_breaks.begin(), v_breaks.end()), v_breaks.end());
    const QuadratureResult r = integrate_adaptive(f, v_breaks, 1e-12, 0.0, 20000);
    if (!r.converged) {
      throw ConvergenceError("lemma quadrature reached error estimate " +
                             std::to_string(r.error));
    }
    return r.value;
  };
  // s in [0, 1], u = 1 - s: denominators (D - B + Bu)(A - B + Bu)^gamma vary on
  // the scales (A - B)/B and (D - B)/B.
  std::vector<double> near;
  for (double scale : {(A - B) / B, (D - B) / B}) {
    for (int k = -12; k <= 12; ++k) near.push_back(scale * std::ldexp(1.0, k));
  }
  const double right = half(D - B, A - B, 1.0, near);
  // s in [-1, 0], u = 1 + s: denominators (D + B - Bu)(A + B - Bu)^gamma >= A^gamma D.
  const double left = half(D + B, A + B, -1.0, {0.5});
  return right + left;
}

int lemma_case(double A, double B, double D) {
  if (D > A && A >= 2.0 * B) return 1;
  if (D >= 2.0 * B && 2.0 * B > A && A > B) return 2;
  if (2.0 * B > D && D > A && A > B) return 3;
  return 0;
}

}  // namespace fbk
