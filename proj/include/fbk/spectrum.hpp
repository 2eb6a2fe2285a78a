#pragma once

// Fourier-Bessel eigen-data on (0,1): positive zeros lambda_n of J_nu,
// normalizers d_n = sqrt(2) / |lambda_n^{1/2} J_{nu+1}(lambda_n)|, and the
// eigenfunctions
//   phi_n(x) = d_n x^{-nu-1/2} (lambda_n x)^{1/2} J_nu(lambda_n x),
//   psi_n(x) = x^{nu+1/2} phi_n(x),
// orthonormal in L^2((0,1), x^{2nu+1} dx) and L^2((0,1), dx) respectively.

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "fbk/errors.hpp"
#include "fbk/specfun.hpp"

namespace fbk {

/// Newton iteration for lambda_{n,nu} failed to settle.
class ZeroConvergenceError : public ConvergenceError {
 public:
  ZeroConvergenceError(std::size_t n, double nu, double last_iterate);

  std::size_t n() const noexcept { return n_; }
  double nu() const noexcept { return nu_; }
  double last_iterate() const noexcept { return last_; }

 private:
  std::size_t n_;
  double nu_;
  double last_;
};

/// Two-term McMahon expansion beta - (4nu^2-1)/(8beta), beta = pi(n + nu/2 - 1/4).
/// Defined for real n, which the truncation estimates use beyond the cached range.
double mcmahon_zero(double nu, double n);

/// lambda_{n,nu} alone, without building a basis.
double bessel_zero(Order order, std::size_t n);

/// Uniform shape bound for |phi_n(x)|, up to a multiplicative constant:
/// min((1-x) n^{nu+2}, (x + 1/n)^{-nu-1/2}).
double eigenfunction_envelope(double nu, double n, double x);

/// Immutable cache of the first `capacity()` eigenpairs of one order.
class SpectralBasis {
 public:
  SpectralBasis(Order order, std::size_t count);

  /// Basis with at least `count` zeros, reusing the zeros already computed.
  SpectralBasis extended(std::size_t count) const;

  Order order() const noexcept { return order_; }
  std::size_t capacity() const noexcept { return zeros_.size(); }

  /// 1-based accessors.
  double zero(std::size_t n) const { return zeros_.at(n - 1); }
  double normalizer(std::size_t n) const { return normalizers_.at(n - 1); }

  std::span<const double> zeros() const noexcept { return zeros_; }
  std::span<const double> normalizers() const noexcept { return normalizers_; }

  /// C with |phi_n(x)| <= C * eigenfunction_envelope(nu, n, x), calibrated on
  /// n <= 200 over a graded x-grid and padded by a factor 1.5.
  double envelope_constant() const noexcept { return envelope_constant_; }

 private:
  SpectralBasis(Order order, std::vector<double> zeros, std::vector<double> normalizers,
                double envelope_constant);

  static void append_zeros(Order order, std::vector<double>& zeros,
                           std::vector<double>& normalizers, std::size_t count);
  static double calibrate(Order order, std::span<const double> zeros,
                          std::span<const double> normalizers);

  Order order_;
  std::vector<double> zeros_;
  std::vector<double> normalizers_;
  double envelope_constant_ = 0.0;
};

/// First `count` positive zeros of J_nu with their normalizers.
SpectralBasis compute_zeros(Order order, std::size_t count);

double eval_phi(const SpectralBasis& basis, std::size_t n, double x);
double eval_psi(const SpectralBasis& basis, std::size_t n, double x);
double eval_phi_derivative(const SpectralBasis& basis, std::size_t n, double x);

/// sup over an x-grid of |phi_n(x)| / ((1-x) n^{nu+2}).
double growth_bound_check(const SpectralBasis& basis, std::size_t n);

/// phi_n evaluated at several points that share precomputed powers x^{-nu}.
class EigenfunctionEvaluator {
 public:
  EigenfunctionEvaluator(const SpectralBasis& basis, std::span<const double> points);

  /// out[i] = phi_n(points[i]).
  void evaluate(std::size_t n, std::span<double> out) const;

 private:
  const SpectralBasis& basis_;
  std::vector<double> points_;
  std::vector<double> neg_power_;  // x^{-nu}
};

/// Thread-safe store of bases keyed by order; grows capacity geometrically.
class BasisCache {
 public:
  std::shared_ptr<const SpectralBasis> get(Order order, std::size_t min_count = 64);

 private:
  std::mutex mutex_;
  std::map<double, std::shared_ptr<const SpectralBasis>> bases_;
};

}  // namespace fbk
