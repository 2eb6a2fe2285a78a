#include "fbk/errors.hpp"
#include "fbk/quadrature.hpp"
#include "fbk/spectrum.hpp"

#include <doctest.h>

#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace fbk;

namespace {

constexpr double kPiD = 3.14159265358979323846;

double j0_series(double z) {
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 80; ++k) {
    term *= -0.25 * z * z / (double(k) * k);
    sum += term;
  }
  return sum;
}

}  // namespace

TEST_CASE("zeros for nu = +-1/2 are exact multiples of pi") {
  const SpectralBasis plus = compute_zeros(Order(0.5), 200);
  const SpectralBasis minus = compute_zeros(Order(-0.5), 200);
  for (std::size_t n = 1; n <= 200; ++n) {
    CHECK(std::fabs(plus.zero(n) - kPiD * n) < 1e-12);
    CHECK(std::fabs(minus.zero(n) - kPiD * (n - 0.5)) < 1e-12);
  }
  CHECK(plus.zero(5) == doctest::Approx(15.7079632679).epsilon(1e-11));
  CHECK(minus.zero(1) == doctest::Approx(1.5707963268).epsilon(1e-10));
}

TEST_CASE("first zero of J_0 against bisection on the power series") {
  double a = 2.0, b = 3.0;
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (a + b);
    ((j0_series(a) > 0) == (j0_series(m) > 0) ? a : b) = m;
  }
  CHECK(std::fabs(bessel_zero(Order(0.0), 1) - 0.5 * (a + b)) < 1e-10);
  CHECK(std::fabs(compute_zeros(Order(0.0), 1).zero(1) - 2.4048255577) < 1e-10);
}

TEST_CASE("zeros against Boost and residual bound") {
  for (double nu : {0.0, 0.3, 1.0, 1.7, 2.5, 8.0, -0.9}) {
    const SpectralBasis basis = compute_zeros(Order(nu), 300);
    for (std::size_t n = 1; n <= 300; ++n) {
      const double ref = boost::math::cyl_bessel_j_zero(nu, static_cast<int>(n));
      const double lambda = basis.zero(n);
      CHECK(lambda == doctest::Approx(ref).epsilon(1e-13));
      // |J'(lambda)| = |J_{nu+1}(lambda)|; one ulp of lambda already moves J by
      // ulp * |J'|, so the bound cannot be tighter than that.
      const double slope = std::fabs(boost::math::cyl_bessel_j(nu + 1.0, lambda));
      const double ulp = std::nextafter(lambda, 1e300) - lambda;
      const double residual = std::fabs(boost::math::cyl_bessel_j(nu, lambda));
      CHECK(residual <= std::max(1e-13, 2.0 * ulp) * slope);
    }
  }
}

TEST_CASE("zeros increase, interlace, and track pi n") {
  for (double nu : {-0.5, 0.0, 0.5, 1.0, 1.5}) {
    const SpectralBasis a = compute_zeros(Order(nu), 2000);
    const SpectralBasis b = compute_zeros(Order(nu + 1.0), 2000);
    for (std::size_t n = 1; n < 2000; ++n) {
      CHECK(a.zero(n) < b.zero(n));
      CHECK(b.zero(n) < a.zero(n + 1));
    }
    for (std::size_t n = 1; n <= 2000; ++n) {
      CHECK(std::fabs(a.zero(n) - kPiD * n) < kPiD * (std::fabs(nu) + 1.0));
    }
  }
}

TEST_CASE("McMahon guess is close for large n") {
  for (double nu : {0.0, 1.0, 3.0}) {
    const SpectralBasis basis = compute_zeros(Order(nu), 1000);
    CHECK(std::fabs(mcmahon_zero(nu, 1000.0) - basis.zero(1000)) < 1e-6);
  }
}

TEST_CASE("normalizers") {
  for (double nu : {-0.5, 0.0, 0.3, 2.5}) {
    const SpectralBasis basis = compute_zeros(Order(nu), 50);
    for (std::size_t n = 1; n <= 50; ++n) {
      const double lambda = basis.zero(n);
      const double expect =
          std::sqrt(2.0) / std::fabs(std::sqrt(lambda) * boost::math::cyl_bessel_j(nu + 1.0, lambda));
      CHECK(basis.normalizer(n) > 0.0);
      CHECK(basis.normalizer(n) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
  // nu = +-1/2: d = sqrt(pi) for every n
  const SpectralBasis half = compute_zeros(Order(0.5), 20);
  for (std::size_t n = 1; n <= 20; ++n) {
    CHECK(half.normalizer(n) == doctest::Approx(std::sqrt(kPiD)).epsilon(1e-13));
  }
}

TEST_CASE("eigenfunction values and boundary behaviour") {
  const SpectralBasis plus = compute_zeros(Order(0.5), 60);
  const SpectralBasis minus = compute_zeros(Order(-0.5), 60);
  CHECK(eval_phi(plus, 1, 0.5) == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(eval_phi(minus, 1, 0.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  for (double nu : {-0.5, 0.0, 0.7, 3.0}) {
    const SpectralBasis basis = compute_zeros(Order(nu), 10);
    for (std::size_t n = 1; n <= 10; ++n) {
      CHECK(eval_phi(basis, n, 1.0) == 0.0);
      // limit at 0: d lambda^{nu+1/2} / (2^nu Gamma(nu+1))
      const double lambda = basis.zero(n);
      const double limit = basis.normalizer(n) * std::pow(lambda, nu + 0.5) /
                           (std::pow(2.0, nu) * std::tgamma(nu + 1.0));
      CHECK(eval_phi(basis, n, 0.0) == doctest::Approx(limit).epsilon(1e-13));
      CHECK(eval_phi(basis, n, 1e-12) == doctest::Approx(limit).epsilon(1e-10));
      // no jump where evaluation switches from the scaled series
      const double x_switch = 6.0 / lambda;
      if (x_switch < 1.0) {
        CHECK(eval_phi(basis, n, std::nextafter(x_switch, 0.0)) ==
              doctest::Approx(eval_phi(basis, n, x_switch)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("trigonometric forms for nu = +-1/2") {
  const SpectralBasis plus = compute_zeros(Order(0.5), 50);
  const SpectralBasis minus = compute_zeros(Order(-0.5), 50);
  for (std::size_t n = 1; n <= 50; ++n) {
    for (int i = 1; i <= 100; ++i) {
      const double x = i / 100.0;
      const double p = std::sqrt(2.0) * std::sin(kPiD * n * x) / x;
      const double m = std::sqrt(2.0) * std::cos(kPiD * (n - 0.5) * x);
      CHECK(std::fabs(eval_phi(plus, n, x) - p) < 1e-12 * std::max(1.0, std::fabs(p)) * n);
      CHECK(std::fabs(eval_phi(minus, n, x) - m) < 1e-12 * n);
    }
  }
}

TEST_CASE("psi = x^{nu+1/2} phi") {
  for (double nu : {-0.5, 0.0, 1.3}) {
    const SpectralBasis basis = compute_zeros(Order(nu), 12);
    for (std::size_t n = 1; n <= 12; ++n) {
      for (int i = 1; i < 100; ++i) {
        const double x = i / 100.0;
        const double expect = std::pow(x, nu + 0.5) * eval_phi(basis, n, x);
        CHECK(std::fabs(eval_psi(basis, n, x) - expect) <= 1e-13 * std::max(1.0, std::fabs(expect)));
      }
    }
  }
}

TEST_CASE("derivative") {
  const SpectralBasis minus = compute_zeros(Order(-0.5), 3);
  CHECK(eval_phi_derivative(minus, 1, 1.0) == doctest::Approx(-std::sqrt(2.0) * kPiD / 2).epsilon(1e-13));
  CHECK(eval_phi_derivative(minus, 1, 1.0) == doctest::Approx(-2.22144).epsilon(1e-5));
  // d/dx [2 sqrt2 sin(pi x) / x] at 1/2 is -8 sqrt2 (the cosine term vanishes there)
  const SpectralBasis plus = compute_zeros(Order(0.5), 3);
  CHECK(eval_phi_derivative(plus, 1, 0.5) ==
        doctest::Approx(std::sqrt(2.0) * (kPiD * std::cos(kPiD / 2) / 0.5 - std::sin(kPiD / 2) / 0.25))
            .epsilon(1e-13));
  for (double nu : {0.0, 0.4, 2.0}) {
    const SpectralBasis b = compute_zeros(Order(nu), 1);
    CHECK(eval_phi_derivative(b, 1, 1.0) == doctest::Approx(-std::sqrt(2.0) * b.zero(1)).epsilon(1e-12));
  }
  const SpectralBasis b = compute_zeros(Order(1.0), 5);
  const double h = 1e-6;
  for (double x : {0.02, 0.3, 0.7, 0.95}) {
    for (std::size_t n : {1, 3, 5}) {
      const double fd = (eval_phi(b, n, x + h) - eval_phi(b, n, x - h)) / (2 * h);
      CHECK(eval_phi_derivative(b, n, x) == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
    }
  }
}

TEST_CASE("orthonormality for a non-half-integer order") {
  const double nu = 0.3;
  const SpectralBasis basis = compute_zeros(Order(nu), 12);
  for (std::size_t n = 1; n <= 12; ++n) {
    for (std::size_t m = n; m <= 12; ++m) {
      auto f = [&](double x) {
        return eval_phi(basis, n, x) * eval_phi(basis, m, x) * std::pow(x, 2 * nu + 1);
      };
      const QuadratureResult r = integrate_adaptive(f, 0.0, 1.0, 1e-13, 1e-14);
      CHECK(std::fabs(r.value - (n == m ? 1.0 : 0.0)) < 1e-10);
    }
  }
}

TEST_CASE("growth bound stays bounded in n") {
  for (double nu : {-0.5, 0.0, 0.5, 1.0}) {
    const SpectralBasis basis = compute_zeros(Order(nu), 100);
    double hi = 0.0;
    for (std::size_t n = 1; n <= 100; ++n) {
      const double g = growth_bound_check(basis, n);
      CHECK(std::isfinite(g));
      CHECK(g > 0.0);
      hi = std::max(hi, g);
    }
    CHECK(hi < basis.envelope_constant());
  }
}

TEST_CASE("calibrated envelope dominates phi_n beyond the calibration range") {
  for (double nu : {-0.5, 0.0, 1.0, 2.5}) {
    const SpectralBasis basis = compute_zeros(Order(nu), 3000);
    const double c = basis.envelope_constant();
    for (std::size_t n : {201, 500, 1111, 2999}) {
      for (int i = 0; i <= 1000; ++i) {
        const double x = i / 1000.0;
        CHECK(std::fabs(eval_phi(basis, n, x)) <= c * eigenfunction_envelope(nu, double(n), x));
      }
    }
  }
}

TEST_CASE("batch evaluator matches pointwise evaluation") {
  const SpectralBasis basis = compute_zeros(Order(0.8), 400);
  const std::vector<double> pts = {0.0, 1e-4, 0.01, 0.35, 0.5, 0.999, 1.0};
  EigenfunctionEvaluator ev(basis, pts);
  std::vector<double> out(pts.size());
  for (std::size_t n : {1, 2, 77, 400}) {
    ev.evaluate(n, out);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      CHECK(out[i] == doctest::Approx(eval_phi(basis, n, pts[i])).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("errors") {
  const SpectralBasis basis = compute_zeros(Order(0.0), 4);
  CHECK_THROWS_AS(eval_phi(basis, 5, 0.5), std::out_of_range);
  CHECK_THROWS_AS(eval_phi(basis, 0, 0.5), std::out_of_range);
  CHECK_THROWS_AS(eval_phi_derivative(basis, 9, 0.5), std::out_of_range);
  CHECK_THROWS_AS(eval_phi(basis, 1, 1.5), DomainError);
  CHECK_THROWS_AS(compute_zeros(Order(0.0), 0), DomainError);
}

TEST_CASE("basis cache") {
  BasisCache cache;
  auto a = cache.get(Order(0.25), 100);
  auto b = cache.get(Order(0.25), 50);
  CHECK(a.get() == b.get());
  auto c = cache.get(Order(0.25), 1000);
  CHECK(c->capacity() >= 1000);
  for (std::size_t n = 1; n <= 100; ++n) CHECK(c->zero(n) == a->zero(n));
  CHECK(c->envelope_constant() == a->envelope_constant());
  CHECK_THROWS_AS(cache.get(Order(0.25), 40'000'000), CapacityError);
}
