#pragma once

// Gauss-Legendre rules, composite panels, and a globally adaptive
// Gauss-Kronrod (7/15) integrator.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <span>
#include <vector>

namespace fbk {

struct GaussLegendreRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

/// n-point rule by Newton iteration on P_n; cached per n.
const GaussLegendreRule& gauss_legendre(int n);

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  int intervals = 0;
  bool converged = false;
};

/// Composite Gauss-Legendre on `panels` equal subintervals of [a, b].
template <class F>
double integrate_composite(F&& f, double a, double b, int panels, int order = 20) {
  const GaussLegendreRule& rule = gauss_legendre(order);
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    double panel = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      panel += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
    }
    sum += 0.5 * h * panel;
  }
  return sum;
}

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment kronrod_segment(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kKronrodNodes[static_cast<std::size_t>(j)];
    const double s = f(c - dx) + f(c + dx);
    kronrod += kKronrodWeights[static_cast<std::size_t>(j)] * s;
    if (j % 2 == 1) gauss += kGaussWeights[static_cast<std::size_t>(j / 2)] * s;
  }
  return {a, b, kronrod * h, std::fabs((kronrod - gauss) * h)};
}

}  // namespace detail

/// Global adaptive G7K15 over [a, b] split at the given breakpoints.
/// Stops when error <= max(abs_tol, rel_tol * |value|).
template <class F>
QuadratureResult integrate_adaptive(F&& f, std::span<const double> breakpoints,
                                    double rel_tol, double abs_tol = 0.0,
                                    int max_intervals = 4000) {
  std::priority_queue<detail::Segment> heap;
  double value = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!(breakpoints[i + 1] > breakpoints[i])) continue;
    detail::Segment s = detail::kronrod_segment(f, breakpoints[i], breakpoints[i + 1]);
    value += s.value;
    error += s.error;
    heap.push(s);
  }
  int count = static_cast<int>(heap.size());
  while (error > std::max(abs_tol, rel_tol * std::fabs(value)) && count < max_intervals &&
         !heap.empty()) {
    detail::Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push(worst);
      break;
    }
    detail::Segment left = detail::kronrod_segment(f, worst.a, mid);
    detail::Segment right = detail::kronrod_segment(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++count;
  }
  // Re-sum to shed the drift of the incremental updates.
  value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  return {value, error, count, error <= std::max(abs_tol, rel_tol * std::fabs(value))};
}

template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double rel_tol,
                                    double abs_tol = 0.0, int max_intervals = 4000) {
  const std::array<double, 2> ends = {a, b};
  return integrate_adaptive(f, std::span<const double>(ends), rel_tol, abs_tol,
                            max_intervals);
}

/// Breakpoints a, a+first, a+2 first, a+4 first, ... capped by b.
std::vector<double> graded_breakpoints(double a, double b, double first);

}  // namespace fbk
