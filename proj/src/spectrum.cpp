#include "fbk/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fbk {

namespace {

constexpr int kMaxNewton = 60;
constexpr std::size_t kCalibrationCount = 200;
constexpr double kCalibrationPad = 1.5;
constexpr std::size_t kCacheLimit = 16'000'000;

// J_nu and J_nu' = (nu/z) J_nu - J_{nu+1} at z > 0.
struct JPair {
  double value;
  double slope;
};

JPair j_with_slope(Order order, Order next, double z) {
  const double j = bessel_j(order, z);
  const double j1 = bessel_j(next, z);
  return {j, order.value() / z * j - j1};
}

bool converged_step(double step, double z) {
  return std::fabs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * z;
}

// A few more Newton steps while |J| keeps shrinking; the bracket exit can
// stop several ulps short.
double polish(Order order, Order next, double z) {
  JPair p = j_with_slope(order, next, z);
  for (int k = 0; k < 4 && p.value != 0.0; ++k) {
    const double trial = z - p.value / p.slope;
    const JPair q = j_with_slope(order, next, trial);
    if (!(std::fabs(q.value) < std::fabs(p.value))) break;
    z = trial;
    p = q;
  }
  return z;
}

// Newton iteration kept inside a sign-change bracket [a, b].
double bracketed_newton(Order order, Order next, std::size_t n, double a, double b,
                        double start) {
  double fa = bessel_j(order, a);
  double z = (start > a && start < b) ? start : 0.5 * (a + b);
  for (int it = 0; it < kMaxNewton; ++it) {
    const JPair p = j_with_slope(order, next, z);
    if (p.value == 0.0) return z;
    if ((p.value > 0.0) == (fa > 0.0)) {
      a = z;
      fa = p.value;
    } else {
      b = z;
    }
    double trial = z - p.value / p.slope;
    if (!(trial > a && trial < b)) trial = 0.5 * (a + b);
    const double step = trial - z;
    z = trial;
    if (converged_step(step, z) || b - a <= 4.0 * std::numeric_limits<double>::epsilon() * z) {
      return polish(order, next, z);
    }
  }
  throw ZeroConvergenceError(n, order.value(), z);
}

// First sign change of J_nu on a 0.5-step scan starting at `from`.
std::pair<double, double> scan_bracket(Order order, std::size_t n, double from) {
  double a = from;
  double fa = bessel_j(order, a);
  for (int k = 0; k < 4000; ++k) {
    const double b = a + 0.5;
    const double fb = bessel_j(order, b);
    if ((fa > 0.0) != (fb > 0.0) || fb == 0.0) return {a, b};
    a = b;
    fa = fb;
  }
  throw ZeroConvergenceError(n, order.value(), a);
}

double find_zero(Order order, Order next, std::size_t n, double previous) {
  const double guess = mcmahon_zero(order.value(), static_cast<double>(n));
  if (n >= 50) {
    // McMahon is accurate to far below the zero spacing here: plain Newton,
    // falling back to the bracketed version if an iterate leaves [g-1, g+1].
    double z = guess;
    for (int it = 0; it < kMaxNewton; ++it) {
      const JPair p = j_with_slope(order, next, z);
      if (p.value == 0.0) return z;
      const double trial = z - p.value / p.slope;
      if (!(trial > guess - 1.0 && trial < guess + 1.0)) break;
      const double step = trial - z;
      z = trial;
      if (converged_step(step, z)) {
        if (z > previous) return z;
        break;
      }
    }
    const double a = std::max(guess - 1.0, previous + 0.5);
    const double b = guess + 1.0;
    if ((bessel_j(order, a) > 0.0) != (bessel_j(order, b) > 0.0)) {
      return bracketed_newton(order, next, n, a, b, guess);
    }
  }
  double from = previous + 0.5;
  if (n == 1) from = std::max(order.value(), 0.0) + 1e-8;
  const auto [a, b] = scan_bracket(order, n, from);
  return bracketed_newton(order, next, n, a, b, guess);
}

// phi_n at x in [0, 1] given lambda, d and x^{-nu}.
double phi_value(double nu, double lambda, double d, double x, double x_neg_nu) {
  if (x == 1.0) return 0.0;
  const double z = lambda * x;
  if (z <= detail::kJSeriesLimit) {
    return d * std::pow(lambda, nu + 0.5) * detail::j_scaled_series(nu, z);
  }
  double j = 0.0;
  if (!(z >= detail::kJHankelMin && detail::j_hankel(nu, z, j))) j = detail::j_miller(nu, z);
  return d * std::sqrt(lambda) * x_neg_nu * j;
}

void check_index(const SpectralBasis& basis, std::size_t n) {
  if (n < 1 || n > basis.capacity()) {
    throw std::out_of_range("eigenfunction index " + std::to_string(n) +
                            " outside basis capacity " + std::to_string(basis.capacity()));
  }
}

void check_point(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("eigenfunction argument must lie in [0, 1], got " + std::to_string(x));
  }
}

}  // namespace

ZeroConvergenceError::ZeroConvergenceError(std::size_t n, double nu, double last_iterate)
    : ConvergenceError("zero " + std::to_string(n) + " of J_" + std::to_string(nu) +
                       " did not converge (last iterate " + std::to_string(last_iterate) +
                       ")"),
      n_(n),
      nu_(nu),
      last_(last_iterate) {}

double mcmahon_zero(double nu, double n) {
  const double beta = kPi * (n + 0.5 * nu - 0.25);
  return beta - (4.0 * nu * nu - 1.0) / (8.0 * beta);
}

double bessel_zero(Order order, std::size_t n) {
  if (n < 1) throw DomainError("zero index must be at least 1");
  const Order next = order.plus(1.0);
  double previous = 0.0;
  for (std::size_t k = 1; k <= n; ++k) previous = find_zero(order, next, k, previous);
  return previous;
}

double eigenfunction_envelope(double nu, double n, double x) {
  const double near_one = (1.0 - x) * std::pow(n, nu + 2.0);
  const double interior = std::pow(x + 1.0 / n, -nu - 0.5);
  return std::min(near_one, interior);
}

SpectralBasis::SpectralBasis(Order order, std::size_t count) : order_(order) {
  if (count < 1) throw DomainError("basis size must be at least 1");
  append_zeros(order_, zeros_, normalizers_, std::max(count, kCalibrationCount));
  envelope_constant_ = calibrate(order_, zeros_, normalizers_);
  zeros_.resize(count);
  normalizers_.resize(count);
}

SpectralBasis::SpectralBasis(Order order, std::vector<double> zeros,
                             std::vector<double> normalizers, double envelope_constant)
    : order_(order),
      zeros_(std::move(zeros)),
      normalizers_(std::move(normalizers)),
      envelope_constant_(envelope_constant) {}

SpectralBasis SpectralBasis::extended(std::size_t count) const {
  std::vector<double> zeros = zeros_;
  std::vector<double> normalizers = normalizers_;
  if (count > zeros.size()) append_zeros(order_, zeros, normalizers, count);
  return SpectralBasis(order_, std::move(zeros), std::move(normalizers), envelope_constant_);
}

void SpectralBasis::append_zeros(Order order, std::vector<double>& zeros,
                                 std::vector<double>& normalizers, std::size_t count) {
  const Order next = order.plus(1.0);
  zeros.reserve(count);
  normalizers.reserve(count);
  double previous = zeros.empty() ? 0.0 : zeros.back();
  for (std::size_t n = zeros.size() + 1; n <= count; ++n) {
    const double lambda = find_zero(order, next, n, previous);
    zeros.push_back(lambda);
    normalizers.push_back(std::sqrt(2.0) / std::fabs(std::sqrt(lambda) * bessel_j(next, lambda)));
    previous = lambda;
  }
}

double SpectralBasis::calibrate(Order order, std::span<const double> zeros,
                                std::span<const double> normalizers) {
  const double nu = order.value();
  std::vector<double> grid;
  for (int i = 1; i < 4000; ++i) grid.push_back(i / 4000.0);
  for (int k = 0; k <= 120; ++k) {
    const double s = std::pow(10.0, -k / 20.0);  // 1 .. 1e-6
    grid.push_back(s * 2.5e-4);
    grid.push_back(1.0 - s * 2.5e-4);
  }
  std::vector<double> neg_power(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) neg_power[i] = std::pow(grid[i], -nu);
  double worst = 0.0;
  const std::size_t count = std::min(zeros.size(), kCalibrationCount);
  for (std::size_t n = 1; n <= count; ++n) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double phi =
          phi_value(nu, zeros[n - 1], normalizers[n - 1], grid[i], neg_power[i]);
      const double env = eigenfunction_envelope(nu, static_cast<double>(n), grid[i]);
      worst = std::max(worst, std::fabs(phi) / env);
    }
  }
  return kCalibrationPad * worst;
}

SpectralBasis compute_zeros(Order order, std::size_t count) {
  return SpectralBasis(order, count);
}

double eval_phi(const SpectralBasis& basis, std::size_t n, double x) {
  check_index(basis, n);
  check_point(x);
  const double nu = basis.order().value();
  const double x_neg_nu = x > 0.0 ? std::pow(x, -nu) : 0.0;
  return phi_value(nu, basis.zero(n), basis.normalizer(n), x, x_neg_nu);
}

double eval_psi(const SpectralBasis& basis, std::size_t n, double x) {
  const double phi = eval_phi(basis, n, x);
  return std::pow(x, basis.order().value() + 0.5) * phi;
}

double eval_phi_derivative(const SpectralBasis& basis, std::size_t n, double x) {
  check_index(basis, n);
  check_point(x);
  const double nu = basis.order().value();
  const double lambda = basis.zero(n);
  const double d = basis.normalizer(n);
  const double z = lambda * x;
  if (z <= detail::kJSeriesLimit) {
    return -d * std::pow(lambda, nu + 2.5) * x * detail::j_scaled_series(nu + 1.0, z);
  }
  return -d * std::sqrt(lambda) * lambda * std::pow(x, -nu) * bessel_j(basis.order().plus(1.0), z);
}

double growth_bound_check(const SpectralBasis& basis, std::size_t n) {
  check_index(basis, n);
  const double nu = basis.order().value();
  const double scale = std::pow(static_cast<double>(n), nu + 2.0);
  double worst = 0.0;
  constexpr int kPoints = 2000;
  for (int i = 1; i < kPoints; ++i) {
    const double x = static_cast<double>(i) / kPoints;
    worst = std::max(worst, std::fabs(eval_phi(basis, n, x)) / ((1.0 - x) * scale));
  }
  return worst;
}

EigenfunctionEvaluator::EigenfunctionEvaluator(const SpectralBasis& basis,
                                               std::span<const double> points)
    : basis_(basis), points_(points.begin(), points.end()), neg_power_(points.size()) {
  const double nu = basis.order().value();
  for (std::size_t i = 0; i < points_.size(); ++i) {
    check_point(points_[i]);
    neg_power_[i] = points_[i] > 0.0 ? std::pow(points_[i], -nu) : 0.0;
  }
}

void EigenfunctionEvaluator::evaluate(std::size_t n, std::span<double> out) const {
  check_index(basis_, n);
  const double nu = basis_.order().value();
  const double lambda = basis_.zero(n);
  const double d = basis_.normalizer(n);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    out[i] = phi_value(nu, lambda, d, points_[i], neg_power_[i]);
  }
}

std::shared_ptr<const SpectralBasis> BasisCache::get(Order order, std::size_t min_count) {
  if (min_count > kCacheLimit) {
    throw CapacityError("requested " + std::to_string(min_count) +
                            " eigenpairs, above the cache limit " + std::to_string(kCacheLimit),
                        min_count);
  }
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = bases_.find(order.value());
  if (it != bases_.end() && it->second->capacity() >= min_count) return it->second;
  std::size_t target = std::max<std::size_t>(min_count, 64);
  if (it != bases_.end()) {
    target = std::min(kCacheLimit, std::max(target, 2 * it->second->capacity()));
    auto grown = std::make_shared<const SpectralBasis>(it->second->extended(target));
    it->second = grown;
    return grown;
  }
  auto fresh = std::make_shared<const SpectralBasis>(order, target);
  bases_.emplace(order.value(), fresh);
  return fresh;
}

}  // namespace fbk
