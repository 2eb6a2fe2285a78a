#include "fbk/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace fbk {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
constexpr double kLanczosG = 7.0;
constexpr double kHalfLog2Pi = 0.91893853320467274178;

void require_nonnegative(double z, const char* fn) {
  if (!(z >= 0.0)) {
    throw DomainError(std::string(fn) + ": argument must be >= 0, got " +
                      std::to_string(z));
  }
}

// cos and sin of (2 nu + 1) pi / 4, exact when 2 nu is an integer.
void hankel_phase(double nu, double& cos_c, double& sin_c) {
  const double twice = 2.0 * nu;
  if (twice == std::floor(twice) && std::fabs(twice) < 1e9) {
    static constexpr double r = 0.70710678118654752440;
    static constexpr std::array<double, 8> cs = {1, r, 0, -r, -1, -r, 0, r};
    static constexpr std::array<double, 8> sn = {0, r, 1, r, 0, -r, -1, -r};
    long m = (static_cast<long>(twice) + 1) % 8;
    if (m < 0) m += 8;
    cos_c = cs[static_cast<std::size_t>(m)];
    sin_c = sn[static_cast<std::size_t>(m)];
    return;
  }
  const double c = (twice + 1.0) * kPi / 4.0;
  cos_c = std::cos(c);
  sin_c = std::sin(c);
}

}  // namespace

Order::Order(double value) : value_(value) {
  if (!std::isfinite(value) || value <= -1.0) {
    throw DomainError("Bessel order must satisfy nu > -1, got " +
                      std::to_string(value));
  }
}

bool Order::is_half_integer() const noexcept {
  const double twice = 2.0 * value_;
  return twice == std::floor(twice) && twice >= -1.0;
}

bool Order::is_odd_half() const noexcept {
  if (!is_half_integer()) return false;
  const double twice = 2.0 * value_;
  return std::fmod(std::fabs(twice), 2.0) == 1.0;
}

int Order::dimension() const {
  if (!is_half_integer()) {
    throw DomainError("order " + std::to_string(value_) +
                      " is not of the form d/2 - 1");
  }
  return static_cast<int>(std::lround(2.0 * value_ + 2.0));
}

double gamma_fn(double x) {
  if (x < 0.5) {
    const double s = std::sin(kPi * x);
    if (s == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return kPi / (s * gamma_fn(1.0 - x));
  }
  if (x > 171.7) return std::numeric_limits<double>::infinity();
  const double xm = x - 1.0;
  double a = kLanczos[0];
  const double t = xm + kLanczosG + 0.5;
  for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (xm + i);
  // t^(xm+0.5) split in two to postpone overflow.
  const double half = std::pow(t, 0.5 * (xm + 0.5));
  return 2.5066282746310002 * half * (half * std::exp(-t)) * a;
}

double log_gamma(double x) {
  if (x < 0.5) {
    const double s = std::fabs(std::sin(kPi * x));
    if (s == 0.0) return std::numeric_limits<double>::infinity();
    return std::log(kPi / s) - log_gamma(1.0 - x);
  }
  const double xm = x - 1.0;
  double a = kLanczos[0];
  const double t = xm + kLanczosG + 0.5;
  for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (xm + i);
  return kHalfLog2Pi + (xm + 0.5) * std::log(t) - t + std::log(a);
}

namespace detail {

double j_scaled_series(double nu, double z) {
  // sum_k (-1)^k (z/2)^{2k} / (2^nu k! Gamma(nu+k+1))
  const double q = 0.25 * z * z;
  double term = 1.0 / (std::pow(2.0, nu) * gamma_fn(nu + 1.0));
  double sum = term;
  double peak = std::fabs(term);
  for (int k = 1; k < 500; ++k) {
    term *= -q / (k * (nu + k));
    sum += term;
    peak = std::max(peak, std::fabs(term));
    if (std::fabs(term) < 1e-17 * peak && k > q) break;
  }
  return sum;
}

double j_series(double nu, double z) {
  if (z == 0.0) {
    if (nu == 0.0) return 1.0;
    return nu > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return std::pow(z, nu) * j_scaled_series(nu, z);
}

double j_miller(double nu, double z) {
  const int top = 2 * static_cast<int>(std::ceil(
                          0.5 * (z + 10.0 * std::cbrt(z) + 25.0)));
  // Normalization weights c_i = (nu+2i) Gamma(nu+i) / (i! Gamma(nu+1)).
  std::vector<double> weight(static_cast<std::size_t>(top / 2 + 1));
  weight[0] = 1.0;
  double g = 1.0;  // prod_{m=1}^{i-1} (nu+m) / i!
  for (int i = 1; i <= top / 2; ++i) {
    weight[static_cast<std::size_t>(i)] = (nu + 2.0 * i) * g;
    g *= (nu + i) / (i + 1.0);
  }
  double above = 0.0;  // order nu + k + 1
  double cur = 1e-30;  // order nu + k
  double norm = (top % 2 == 0) ? weight[static_cast<std::size_t>(top / 2)] * cur : 0.0;
  for (int k = top; k > 0; --k) {
    const double below = 2.0 * (nu + k) / z * cur - above;
    above = cur;
    cur = below;
    const int idx = k - 1;
    if (idx % 2 == 0) norm += weight[static_cast<std::size_t>(idx / 2)] * cur;
    if (std::fabs(cur) > 1e250) {
      cur *= 1e-250;
      above *= 1e-250;
      norm *= 1e-250;
    }
  }
  const double lead = std::exp(nu * std::log(0.5 * z) - log_gamma(nu + 1.0));
  return cur * lead / norm;
}

bool j_hankel(double nu, double z, double& out) {
  const double mu = 4.0 * nu * nu;
  double p = 1.0;
  double q = 0.0;
  double term = 1.0;
  double prev = 1.0;
  const double inv8z = 1.0 / (8.0 * z);
  bool converged = false;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) * inv8z / k;
    if (term == 0.0) {
      converged = true;
      break;
    }
    if (std::fabs(term) > std::fabs(prev) && k > 2) break;
    switch (k % 4) {
      case 1: q += term; break;
      case 2: p -= term; break;
      case 3: q -= term; break;
      default: p += term; break;
    }
    if (std::fabs(term) < 1e-17) {
      converged = true;
      break;
    }
    prev = term;
  }
  if (!converged) return false;
  double cos_c = 0.0;
  double sin_c = 0.0;
  hankel_phase(nu, cos_c, sin_c);
  const double cz = std::cos(z);
  const double sz = std::sin(z);
  const double cos_w = cz * cos_c + sz * sin_c;
  const double sin_w = sz * cos_c - cz * sin_c;
  out = std::sqrt(2.0 / (kPi * z)) * (p * cos_w - q * sin_w);
  return true;
}

double i_series_log(double nu, double z) {
  const double q = 0.25 * z * z;
  double term = 1.0;
  double sum = 1.0;
  double log_shift = 0.0;
  for (int k = 1; k < 100000; ++k) {
    term *= q / (k * (nu + k));
    sum += term;
    if (sum > 1e280) {
      sum *= 1e-280;
      term *= 1e-280;
      log_shift += 280.0 * std::log(10.0);
    }
    if (term < kEps * 0.1 * sum) break;
  }
  return nu * std::log(0.5 * z) - log_gamma(nu + 1.0) + std::log(sum) + log_shift;
}

bool i_asymptotic_scaled(double nu, double z, double& out) {
  const double mu = 4.0 * nu * nu;
  double sum = 1.0;
  double term = 1.0;
  double prev = 1.0;
  const double inv8z = 1.0 / (8.0 * z);
  bool converged = false;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(mu - odd * odd) * inv8z / k;
    if (term == 0.0) {
      converged = true;
      break;
    }
    if (std::fabs(term) > std::fabs(prev) && k > 2) return false;
    sum += term;
    if (std::fabs(term) < 1e-17 * std::fabs(sum)) {
      converged = true;
      break;
    }
    prev = term;
  }
  if (!converged) return false;
  out = sum / std::sqrt(2.0 * kPi * z);
  return true;
}

}  // namespace detail

double bessel_j(Order order, double z) {
  require_nonnegative(z, "bessel_j");
  const double nu = order.value();
  if (z <= detail::kJSeriesLimit) return detail::j_series(nu, z);
  if (z >= detail::kJHankelMin) {
    double out = 0.0;
    if (detail::j_hankel(nu, z, out)) return out;
  }
  return detail::j_miller(nu, z);
}

double bessel_j_scaled(Order order, double z) {
  require_nonnegative(z, "bessel_j_scaled");
  const double nu = order.value();
  if (z <= detail::kJSeriesLimit) return detail::j_scaled_series(nu, z);
  return bessel_j(order, z) * std::pow(z, -nu);
}

double bessel_j_half_integer(Order order, double z) {
  require_nonnegative(z, "bessel_j_half_integer");
  if (!order.is_odd_half()) return bessel_j(order, z);
  const double nu = order.value();
  if (z == 0.0) {
    if (nu < 0.0) {
      throw DomainError("bessel_j_half_integer: J_{-1/2} is singular at z = 0");
    }
    return 0.0;
  }
  const double amp = std::sqrt(2.0 / (kPi * z));
  const double j_minus = amp * std::cos(z);  // J_{-1/2}
  const double j_plus = amp * std::sin(z);   // J_{1/2}
  if (nu == -0.5) return j_minus;
  if (nu == 0.5) return j_plus;
  const int steps = static_cast<int>(std::lround(nu - 0.5));  // nu = 1/2 + steps
  if (z >= nu) {
    double lower = j_minus;
    double cur = j_plus;
    double cur_order = 0.5;
    for (int k = 0; k < steps; ++k) {
      const double next = 2.0 * cur_order / z * cur - lower;
      lower = cur;
      cur = next;
      cur_order += 1.0;
    }
    return cur;
  }
  // Downward recurrence from well above nu, normalized at order +-1/2.
  const int top = steps + 20 + static_cast<int>(std::ceil(z));
  double above = 0.0;
  double cur = 1e-30;
  double at_nu = 0.0;
  for (int k = top; k > -1; --k) {
    // cur holds order k + 1/2
    if (k == steps) at_nu = cur;
    const double below = 2.0 * (k + 0.5) / z * cur - above;
    above = cur;
    cur = below;
    if (std::fabs(cur) > 1e250) {
      cur *= 1e-250;
      above *= 1e-250;
      at_nu *= 1e-250;
    }
  }
  // above holds order 1/2, cur holds order -1/2
  if (std::fabs(j_plus) >= std::fabs(j_minus)) return at_nu * (j_plus / above);
  return at_nu * (j_minus / cur);
}

ScaledValue bessel_i_scaled(Order order, double z) {
  require_nonnegative(z, "bessel_i");
  const double nu = order.value();
  if (z == 0.0) {
    if (nu == 0.0) return {1.0, 0.0};
    if (nu > 0.0) return {0.0, 0.0};
    return {std::numeric_limits<double>::infinity(), 0.0};
  }
  if (z > detail::kISeriesLimit) {
    double out = 0.0;
    if (detail::i_asymptotic_scaled(nu, z, out)) return {out, z};
  }
  const double log_i = detail::i_series_log(nu, z);
  return {std::exp(log_i - z), z};
}

double bessel_i(Order order, double z) { return bessel_i_scaled(order, z).value(); }

double log_bessel_i(Order order, double z) {
  if (!(z > 0.0)) throw DomainError("log_bessel_i: argument must be > 0");
  return bessel_i_scaled(order, z).log();
}

}  // namespace fbk
