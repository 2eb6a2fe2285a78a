#pragma once

// Bessel functions of the first kind J_nu, I_nu for real order nu > -1 and
// real argument z >= 0, plus the Gamma function they need.
//
// Evaluation regimes for J_nu:
//   z <= kJSeriesLimit                power series
//   kJSeriesLimit < z < kJHankelMin   Miller backward recurrence, normalized
//                                     by sum_k (nu+2k) G(nu+k)/k! J_{nu+2k}
//   z >= kJHankelMin                  Hankel asymptotic expansion, falling
//                                     back to Miller when it does not reach
//                                     double precision (large |nu|)
// I_nu uses the (positive) power series up to kISeriesLimit and the
// asymptotic expansion above it.

#include <cmath>

#include "fbk/errors.hpp"

namespace fbk {

inline constexpr double kPi = 3.14159265358979323846;

/// Bessel order nu, restricted to nu > -1.
class Order {
 public:
  explicit Order(double value);

  double value() const noexcept { return value_; }

  /// True when 2*nu is an integer (nu = d/2 - 1 for some dimension d >= 1).
  bool is_half_integer() const noexcept;

  /// True when nu = k + 1/2 for an integer k >= -1 (trigonometric closed forms).
  bool is_odd_half() const noexcept;

  /// Dimension d with nu = d/2 - 1; requires is_half_integer().
  int dimension() const;

  Order plus(double delta) const { return Order(value_ + delta); }

  friend bool operator==(const Order& a, const Order& b) noexcept {
    return a.value_ == b.value_;
  }

 private:
  double value_;
};

/// Gamma function (Lanczos approximation, g = 7, 9 terms).
double gamma_fn(double x);

/// log|Gamma(x)|.
double log_gamma(double x);

/// J_nu(z). Throws DomainError for z < 0. J_nu(0) is +inf for -1 < nu < 0.
double bessel_j(Order order, double z);

/// z^{-nu} J_nu(z); entire in z, equals 1/(2^nu Gamma(nu+1)) at z = 0.
double bessel_j_scaled(Order order, double z);

/// Closed trigonometric evaluation for nu = k + 1/2 (upward recurrence from
/// J_{-1/2}, J_{1/2} when z >= nu, downward recurrence otherwise). Integer
/// orders have no trigonometric form and are delegated to bessel_j.
double bessel_j_half_integer(Order order, double z);

/// value = mantissa * exp(log_scale).
struct ScaledValue {
  double mantissa = 0.0;
  double log_scale = 0.0;

  double value() const { return mantissa * std::exp(log_scale); }
  double log() const { return std::log(mantissa) + log_scale; }
};

/// I_nu(z) as {I_nu(z) e^{-z}, z}; never overflows.
ScaledValue bessel_i_scaled(Order order, double z);

/// I_nu(z); +inf once the value exceeds the double range.
double bessel_i(Order order, double z);

/// log I_nu(z) for z > 0.
double log_bessel_i(Order order, double z);

namespace detail {

inline constexpr double kJSeriesLimit = 6.0;
inline constexpr double kJHankelMin = 20.0;
inline constexpr double kISeriesLimit = 25.0;

double j_series(double nu, double z);
double j_scaled_series(double nu, double z);
double j_miller(double nu, double z);
/// Returns false when the expansion does not converge to double precision.
bool j_hankel(double nu, double z, double& out);

double i_series_log(double nu, double z);
bool i_asymptotic_scaled(double nu, double z, double& out);

}  // namespace detail

}  // namespace fbk
