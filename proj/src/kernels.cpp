#include "fbk/kernels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

namespace fbk {

namespace {

constexpr double kSqrtPi = 1.77245385090551602730;

struct Neumaier {
  double sum = 0.0;
  double comp = 0.0;

  void add(double v) {
    const double t = sum + v;
    const bool big = std::fabs(sum) >= std::fabs(v);
    const double hi = big ? sum : v;
    const double lo = big ? v : sum;
    comp += (hi - t) + lo;
    sum = t;
  }
  double value() const { return sum + comp; }
};

// Every n up to 16, then 16 evenly spaced checks per doubling of n.
bool is_checkpoint(std::size_t n) {
  if (n <= 16) return true;
  const std::size_t step = std::bit_floor(n) / 16;
  return n % step == 0;
}

double zero_estimate(const SpectralBasis& basis, double m) {
  if (m <= static_cast<double>(basis.capacity())) {
    return basis.zero(static_cast<std::size_t>(m));
  }
  return mcmahon_zero(basis.order().value(), m);
}

// sup of the eigenfunction envelope over n in [lo, hi].
double block_envelope(double nu, double x, double lo, double hi) {
  const double near_one = (1.0 - x) * std::pow(hi, nu + 2.0);
  const double at = nu >= -0.5 ? hi : lo;
  const double interior = std::pow(x + 1.0 / at, -nu - 0.5);
  return std::min(near_one, interior);
}

double block_term(const SpectralBasis& basis, double alpha, double t, double x, double y,
                  double m) {
  // [m, 2m) in eight slices, each bounded by its own sup.
  const double nu = basis.order().value();
  double total = 0.0;
  for (int k = 0; k < 8; ++k) {
    const double lo = m * (1.0 + k / 8.0);
    const double hi = m * (1.0 + (k + 1) / 8.0);
    const double decay = std::exp(-t * std::pow(zero_estimate(basis, std::floor(lo)), alpha));
    if (decay == 0.0) break;
    total += std::ceil(hi - lo) * decay *
             (block_envelope(nu, x, lo, hi) * block_envelope(nu, y, lo, hi));
  }
  return total;
}

void check_query(double alpha, double t, double x, double y, double tol) {
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    throw DomainError("alpha must lie in (0, 2], got " + std::to_string(alpha));
  }
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw DomainError("t must be positive, got " + std::to_string(t));
  }
  if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0)) {
    throw DomainError("x and y must lie in [0, 1]");
  }
  if (!(tol > 0.0 && tol <= 1e-2)) {
    throw DomainError("tol must lie in (0, 1e-2], got " + std::to_string(tol));
  }
}

void check_t_min(double alpha, double t, const SeriesOptions& opts) {
  if (!opts.enforce_t_min) return;
  const double floor = t_min(alpha);
  if (t < floor) {
    throw TimeBelowMinimumError(
        "t = " + std::to_string(t) + " is below the series minimum " + std::to_string(floor) +
        " for alpha = " + std::to_string(alpha) +
        "; use the closed forms (nu = +-1/2, alpha in {1, 2}: --method closed) or the "
        "d = 1 image/transference kernel (transfer-check) instead");
  }
}

void require_half(Order nu_half, const char* fn) {
  if (nu_half.value() != 0.5 && nu_half.value() != -0.5) {
    throw DomainError(std::string(fn) + " is only available for nu = +-1/2");
  }
}

// sin(pi a) / a with its limit at a = 0.
double sin_pi_over(double a) { return a == 0.0 ? kPi : std::sin(kPi * a) / a; }

double gauss(double u, double t) {
  return std::exp(-u * u / (4.0 * t)) / std::sqrt(4.0 * kPi * t);
}

// Sum of e^{-(P j - P)^2/(4t)} / sqrt(4 pi t) over j > J, where P is the
// image period; each omitted image sits at least P j - P from the target.
double image_tail(double period, double t, int J) {
  double total = 0.0;
  for (int j = J + 1; j < J + 200; ++j) {
    const double u = std::max(0.0, period * j - period);
    const double term = gauss(u, t);
    total += term;
    if (term < 1e-20 * total || term == 0.0) break;
  }
  return total;
}

}  // namespace

double t_min(double alpha) {
  if (alpha >= 1.0) return 1e-3;
  // Keeps the truncation index of the slowly decaying alpha < 1 series near
  // a few million terms.
  return std::max(1e-3, 30.0 * std::pow(kPi * 5e6, -alpha));
}

double series_tail_bound(const SpectralBasis& basis, double alpha, double t, double x, double y,
                         std::size_t N) {
  const double c = basis.envelope_constant();
  double m = static_cast<double>(N) + 1.0;
  double total = 0.0;
  double previous = std::numeric_limits<double>::infinity();
  for (int block = 0; block < 400; ++block) {
    const double term = block_term(basis, alpha, t, x, y, m);
    total += term;
    if (term == 0.0) break;
    if (term < 1e-6 * total && term < 0.5 * previous) break;
    previous = term;
    m *= 2.0;
  }
  return c * c * total;
}

std::size_t suggested_capacity(double alpha, double t, double tol) {
  const double target = (std::log(1.0 / tol) + 20.0) / t;
  const double lambda = std::pow(target, 1.0 / alpha);
  const double n = lambda / kPi + 32.0;
  return static_cast<std::size_t>(std::min(n, 1.6e7));
}

std::vector<KernelValue> kernel_series_grid(Order order, double alpha,
                                            std::span<const double> xs,
                                            std::span<const double> ys,
                                            std::span<const double> ts, double tol,
                                            const SpectralBasis& basis,
                                            const SeriesOptions& opts) {
  if (!(basis.order() == order)) throw DomainError("basis order does not match the query");
  for (double t : ts) {
    for (double x : xs) {
      for (double y : ys) check_query(alpha, t, x, y, tol);
    }
    check_t_min(alpha, t, opts);
  }
  const std::size_t nx = xs.size();
  const std::size_t ny = ys.size();
  const std::size_t nt = ts.size();
  const std::size_t total = nx * ny * nt;
  std::vector<KernelValue> out(total);
  if (total == 0) return out;

  std::vector<double> points(xs.begin(), xs.end());
  points.insert(points.end(), ys.begin(), ys.end());
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  auto index_of = [&](double v) {
    return static_cast<std::size_t>(std::lower_bound(points.begin(), points.end(), v) -
                                    points.begin());
  };
  std::vector<std::size_t> ix_point(nx), iy_point(ny);
  for (std::size_t i = 0; i < nx; ++i) ix_point[i] = index_of(xs[i]);
  for (std::size_t i = 0; i < ny; ++i) iy_point[i] = index_of(ys[i]);

  const EigenfunctionEvaluator evaluator(basis, points);
  std::vector<double> phi(points.size());
  std::vector<double> decay(nt);
  std::vector<Neumaier> acc(total);
  struct Slot {
    std::size_t k, px, py, it;
  };
  std::vector<Slot> active;
  active.reserve(total);
  for (std::size_t ix = 0; ix < nx; ++ix) {
    for (std::size_t iy = 0; iy < ny; ++iy) {
      for (std::size_t it = 0; it < nt; ++it) {
        active.push_back({(ix * ny + iy) * nt + it, ix_point[ix], iy_point[iy], it});
      }
    }
  }
  const double c2 = basis.envelope_constant() * basis.envelope_constant();

  std::size_t n = 0;
  while (!active.empty()) {
    ++n;
    if (n > basis.capacity()) {
      // Smallest N (on the McMahon-extended bound) that would settle every open point.
      double need = static_cast<double>(basis.capacity());
      for (const Slot& s : active) {
        const double limit = tol * std::max(std::fabs(acc[s.k].value()), kValueFloor);
        const double x = points[s.px];
        const double y = points[s.py];
        const double t = ts[s.it];
        for (int i = 0; i < 200; ++i) {
          if (series_tail_bound(basis, alpha, t, x, y, static_cast<std::size_t>(need)) <=
              limit) {
            break;
          }
          need *= 1.1;
        }
      }
      throw CapacityError("series needs more than " + std::to_string(basis.capacity()) +
                              " eigenpairs",
                          static_cast<std::size_t>(need * 1.05) + 16);
    }
    const double lambda_a = std::pow(basis.zero(n), alpha);
    for (std::size_t it = 0; it < nt; ++it) decay[it] = std::exp(-ts[it] * lambda_a);
    evaluator.evaluate(n, phi);
    for (const Slot& s : active) acc[s.k].add(decay[s.it] * (phi[s.px] * phi[s.py]));
    if (!is_checkpoint(n)) continue;
    std::size_t kept = 0;
    for (const Slot& s : active) {
      const double x = points[s.px];
      const double y = points[s.py];
      const double t = ts[s.it];
      const double limit = tol * std::max(std::fabs(acc[s.k].value()), kValueFloor);
      // The first block alone bounds the tail from below.
      const double first =
          c2 * block_term(basis, alpha, t, x, y, static_cast<double>(n) + 1.0);
      double tail = std::numeric_limits<double>::infinity();
      if (first <= limit) tail = series_tail_bound(basis, alpha, t, x, y, n);
      if (tail <= limit) {
        out[s.k] = {acc[s.k].value(), n, tail};
      } else {
        active[kept++] = s;
      }
    }
    active.resize(kept);
  }
  if (opts.psi) {
    const double p = order.value() + 0.5;
    for (std::size_t k = 0; k < total; ++k) {
      const std::size_t iy = (k / nt) % ny;
      const std::size_t ix = k / (nt * ny);
      const double w = std::pow(xs[ix] * ys[iy], p);
      out[k].value *= w;
      out[k].tail_estimate *= w;
    }
  }
  return out;
}

KernelValue kernel_series(const KernelQuery& q, const SpectralBasis& basis,
                          const SeriesOptions& opts) {
  const double xs[] = {q.x};
  const double ys[] = {q.y};
  const double ts[] = {q.t};
  return kernel_series_grid(q.order, q.alpha, xs, ys, ts, q.tol, basis, opts).front();
}

std::vector<KernelValue> evaluate_kernel_grid(Order order, double alpha,
                                              std::span<const double> xs,
                                              std::span<const double> ys,
                                              std::span<const double> ts, double tol,
                                              BasisCache& cache, const SeriesOptions& opts) {
  std::size_t want = 64;
  for (double t : ts) {
    if (t > 0.0) want = std::max(want, suggested_capacity(alpha, t, tol));
  }
  for (;;) {
    auto basis = cache.get(order, want);
    try {
      return kernel_series_grid(order, alpha, xs, ys, ts, tol, *basis, opts);
    } catch (const CapacityError& e) {
      if (e.required() <= basis->capacity()) throw;
      want = e.required();
    }
  }
}

KernelValue evaluate_kernel(const KernelQuery& q, BasisCache& cache, const SeriesOptions& opts) {
  const double xs[] = {q.x};
  const double ys[] = {q.y};
  const double ts[] = {q.t};
  return evaluate_kernel_grid(q.order, q.alpha, xs, ys, ts, q.tol, cache, opts).front();
}

double poisson_closed_form(Order nu_half, double t, double x, double y) {
  require_half(nu_half, "poisson_closed_form");
  if (!(t > 0.0)) throw DomainError("poisson_closed_form: t must be positive");
  // With q = e^{-pi t}: sinh(pi t) / (cosh(pi t) - cos a) = (1 - q^2) / D(a),
  // D(a) = (1 - q)^2 + 4 q sin^2(a/2), free of overflow for any t.
  const double q = std::exp(-kPi * t);
  const double a = kPi * (x - y);
  const double b = kPi * (x + y);
  auto denom = [q](double angle) {
    const double s = std::sin(0.5 * angle);
    return (1.0 - q) * (1.0 - q) + 4.0 * q * s * s;
  };
  if (nu_half.value() == 0.5) {
    return 2.0 * q * (1.0 - q * q) * sin_pi_over(x) * sin_pi_over(y) / (denom(a) * denom(b));
  }
  return std::sqrt(q) * (1.0 - q) *
         (std::cos(0.5 * a) / denom(a) + std::cos(0.5 * b) / denom(b));
}

ImageSum heat_closed_form(Order nu_half, double t, double x, double y, int image_count) {
  require_half(nu_half, "heat_closed_form");
  if (!(t > 0.0)) throw DomainError("heat_closed_form: t must be positive");
  if (image_count < 1) throw DomainError("heat_closed_form: image_count must be >= 1");
  Neumaier sum;
  if (nu_half.value() == 0.5) {
    if (!(x > 0.0 && y > 0.0)) throw DomainError("heat_closed_form: x, y must be positive");
    // g(a - y) - g(a + y) = g(a - y) (1 - e^{-a y / t}) with a = x - 2j,
    // written around whichever Gaussian is larger.
    for (int j = -image_count; j <= image_count; ++j) {
      const double a = x - 2.0 * j;
      if (a * y >= 0.0) {
        sum.add(gauss(a - y, t) * -std::expm1(-a * y / t));
      } else {
        sum.add(gauss(a + y, t) * std::expm1(a * y / t));
      }
    }
    const double tail = 4.0 * image_tail(2.0, t, image_count);
    return {sum.value() / (x * y), tail / (x * y)};
  }
  for (int j = -image_count; j <= image_count; ++j) {
    const double s = 4.0 * j;
    sum.add(gauss(x - y - s, t));
    sum.add(gauss(x + y - s, t));
    sum.add(-gauss(x - y - s - 2.0, t));
    sum.add(-gauss(x + y - s - 2.0, t));
  }
  return {sum.value(), 8.0 * image_tail(4.0, t, image_count)};
}

double heat_trig_series(Order nu_half, double t, double x, double y) {
  require_half(nu_half, "heat_trig_series");
  if (!(t > 0.0)) throw DomainError("heat_trig_series: t must be positive");
  const bool odd = nu_half.value() == 0.5;
  Neumaier sum;
  for (int n = 1; n < 100000; ++n) {
    const double k = odd ? n : n - 0.5;
    const double decay = std::exp(-t * kPi * kPi * k * k);
    double term = 0.0;
    double bound = 0.0;
    if (odd) {
      // sin(pi n x) / x = n sin_pi_over(n x)
      term = 2.0 * decay * n * n * sin_pi_over(n * x) * sin_pi_over(n * y);
      bound = 2.0 * decay * kPi * kPi * n * n;
    } else {
      term = 2.0 * decay * std::cos(kPi * k * x) * std::cos(kPi * k * y);
      bound = 2.0 * decay;
    }
    sum.add(term);
    // Terms decay faster than geometrically once t pi^2 k^2 > 1.
    if (t * kPi * kPi * k * k > 1.0 && bound < 1e-18 * std::fabs(sum.value())) break;
    if (decay == 0.0) break;
  }
  return sum.value();
}

double heat_closed_form_auto(Order nu_half, double t, double x, double y) {
  if (t <= 0.25) return heat_closed_form(nu_half, t, x, y, 8).value;
  return heat_trig_series(nu_half, t, x, y);
}

double hankel_kernel(double lambda_param, double t, double x, double y) {
  if (!(lambda_param > -0.5)) throw DomainError("hankel_kernel: lambda must exceed -1/2");
  if (!(t > 0.0 && x > 0.0 && y > 0.0)) {
    throw DomainError("hankel_kernel: t, x, y must be positive");
  }
  const double z = x * y / (2.0 * t);
  const ScaledValue i = bessel_i_scaled(Order(lambda_param - 0.5), z);
  // e^{-(x^2+y^2)/(4t)} e^{z} = e^{-(x-y)^2/(4t)}
  const double log_rest = -(x - y) * (x - y) / (4.0 * t) +
                          (0.5 - lambda_param) * std::log(x * y) - std::log(2.0 * t);
  return i.mantissa * std::exp(log_rest + (i.log_scale - z));
}

QuadratureResult subordination_check(const KernelQuery& q, const SpectralBasis& basis) {
  if (q.alpha != 1.0) throw DomainError("subordination_check requires alpha = 1");
  check_query(q.alpha, q.t, q.x, q.y, q.tol);
  const double t = q.t;
  const double lambda1 = basis.zero(1);
  const std::size_t cap = basis.capacity();

  std::vector<double> products;
  auto product = [&](std::size_t n) {
    while (products.size() < n) {
      const std::size_t m = products.size() + 1;
      products.push_back(eval_phi(basis, m, q.x) * eval_phi(basis, m, q.y));
    }
    return products[n - 1];
  };
  auto heat = [&](double s) {
    Neumaier sum;
    for (std::size_t n = 1;; ++n) {
      if (n > cap) throw CapacityError("subordination integrand exhausted the basis", 2 * cap);
      const double lambda = basis.zero(n);
      sum.add(std::exp(-s * lambda * lambda) * product(n));
      if (!is_checkpoint(n)) continue;
      const double limit = 1e-14 * std::max(std::fabs(sum.value()), kValueFloor);
      if (series_tail_bound(basis, 2.0, s, q.x, q.y, n) <= limit) break;
    }
    return sum.value();
  };
  auto integrand = [&](double u) {
    const double s = std::exp(u);
    return t / (2.0 * kSqrtPi) / std::sqrt(s) * std::exp(-t * t / (4.0 * s)) * heat(s);
  };
  const double lo = std::log(t * t / 400.0);
  const double hi = std::log((t * lambda1 + 40.0) / (lambda1 * lambda1));
  std::vector<double> breaks;
  constexpr int kPanels = 24;
  for (int i = 0; i <= kPanels; ++i) breaks.push_back(lo + (hi - lo) * i / kPanels);
  QuadratureResult r = integrate_adaptive(integrand, breaks, 1e-10, 0.0, 20000);
  if (!r.converged) {
    throw ConvergenceError("subordination quadrature reached error estimate " +
                           std::to_string(r.error) + " for value " + std::to_string(r.value));
  }
  return r;
}

std::vector<double> project_coefficients(const std::function<double(double)>& f,
                                         const SpectralBasis& basis, std::size_t count,
                                         double rel_tol) {
  if (count > basis.capacity()) {
    throw CapacityError("projection needs " + std::to_string(count) + " eigenpairs", count);
  }
  const double w = 2.0 * basis.order().value() + 1.0;
  std::vector<double> coeffs(count);
  for (std::size_t n = 1; n <= count; ++n) {
    std::vector<double> breaks;
    const std::size_t panels = n + 4;
    for (std::size_t i = 0; i <= panels; ++i) {
      breaks.push_back(static_cast<double>(i) / static_cast<double>(panels));
    }
    auto integrand = [&](double x) { return f(x) * eval_phi(basis, n, x) * std::pow(x, w); };
    coeffs[n - 1] = integrate_adaptive(integrand, breaks, rel_tol, 1e-15).value;
  }
  return coeffs;
}

double apply_semigroup(Order order, double alpha, double t, double x,
                       std::span<const double> coefficients, const SpectralBasis& basis) {
  if (!(basis.order() == order)) throw DomainError("basis order does not match the query");
  check_query(alpha, t, x, x, 1e-2);
  if (coefficients.size() > basis.capacity()) {
    throw CapacityError("semigroup needs " + std::to_string(coefficients.size()) +
                            " eigenpairs",
                        coefficients.size());
  }
  Neumaier sum;
  for (std::size_t n = 1; n <= coefficients.size(); ++n) {
    if (coefficients[n - 1] == 0.0) continue;
    const double decay = std::exp(-t * std::pow(basis.zero(n), alpha));
    sum.add(decay * coefficients[n - 1] * eval_phi(basis, n, x));
  }
  return sum.value();
}

double apply_semigroup(Order order, double alpha, double t, double x,
                       const std::function<double(double)>& f, std::size_t count,
                       const SpectralBasis& basis) {
  const std::vector<double> coeffs = project_coefficients(f, basis, count);
  return apply_semigroup(order, alpha, t, x, coeffs, basis);
}

QuadratureResult submarkov_mass(const KernelQuery& q, const SpectralBasis& basis,
                                double rel_tol) {
  const double w = 2.0 * q.order.value() + 1.0;
  const double spread = std::pow(q.t, 1.0 / q.alpha);
  std::vector<double> breaks = {0.0, 1.0, q.x};
  for (double k : {0.5, 1.0, 3.0}) {
    breaks.push_back(q.x - k * spread);
    breaks.push_back(q.x + k * spread);
  }
  std::erase_if(breaks, [](double b) { return b < 0.0 || b > 1.0; });
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  auto integrand = [&](double y) {
    KernelQuery p = q;
    p.y = y;
    return kernel_series(p, basis).value * std::pow(y, w);
  };
  return integrate_adaptive(integrand, breaks, rel_tol, 0.0, 4000);
}

Composition semigroup_composition(const KernelQuery& q, double s, const SpectralBasis& basis,
                                  double rel_tol) {
  const double w = 2.0 * q.order.value() + 1.0;
  auto integrand = [&](double z) {
    KernelQuery a = q;
    a.y = z;
    KernelQuery b = q;
    b.t = s;
    b.x = z;
    return kernel_series(a, basis).value * kernel_series(b, basis).value * std::pow(z, w);
  };
  std::vector<double> breaks = {0.0, std::min(q.x, q.y), std::max(q.x, q.y), 1.0};
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  const QuadratureResult r = integrate_adaptive(integrand, breaks, rel_tol, 0.0, 4000);
  KernelQuery sum = q;
  sum.t = q.t + s;
  return {r.value, kernel_series(sum, basis).value, r.error};
}

}  // namespace fbk
