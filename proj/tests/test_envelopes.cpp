#include "fbk/envelopes.hpp"
#include "fbk/errors.hpp"
#include "fbk/kernels.hpp"
#include "fbk/spectrum.hpp"
#include "fbk/transference.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace fbk;

namespace {

constexpr double kPiD = 3.14159265358979323846;

double soft_min(double z) { return z / (1.0 + z); }

}  // namespace

TEST_CASE("heat envelope on (0,1)") {
  // all minima saturate on the diagonal away from the ends
  for (double nu : {-0.5, 0.0, 1.0}) {
    const EnvelopeBounds b = heat_envelope_interval(Order(nu), 0.01, 0.5, 0.5, 3.0);
    const double expect = std::pow(0.5, -2 * nu - 1) / std::sqrt(0.01);
    CHECK(b.lower == doctest::Approx(expect).epsilon(1e-14));
    CHECK(b.upper == doctest::Approx(expect).epsilon(1e-14));
    CHECK(b.constant_c == 3.0);
  }
  CHECK(heat_envelope_interval(Order(0.5), 0.01, 0.5, 0.5, 2.0).upper == doctest::Approx(40.0).epsilon(1e-14));
  // larger c widens the pair
  for (double x : {0.05, 0.4, 0.9}) {
    for (double y : {0.1, 0.7}) {
      double lo = INFINITY, hi = 0.0;
      for (double c : {1.1, 1.5, 2.0, 4.0, 8.0}) {
        const EnvelopeBounds b = heat_envelope_interval(Order(0.3), 0.05, x, y, c);
        CHECK(b.lower <= b.upper);
        CHECK(b.lower <= lo);
        CHECK(b.upper >= hi);
        lo = b.lower;
        hi = b.upper;
      }
    }
  }
  CHECK_THROWS_AS(heat_envelope_interval(Order(0.0), 0.1, 0.5, 0.5, 1.0), DomainError);
  CHECK_THROWS_AS(heat_envelope_interval(Order(0.0), -0.1, 0.5, 0.5, 2.0), DomainError);
}

TEST_CASE("subordinated envelope") {
  for (double nu : {-0.5, 0.0, 1.5}) {
    for (double alpha : {0.5, 1.0, 1.5}) {
      const double t = 0.001;
      const double x = 0.5;
      const double v = subordinated_envelope_interval(Order(nu), alpha, t, x, x);
      CHECK(v == doctest::Approx(std::pow(x, -2 * nu - 1) * std::pow(t, -1.0 / alpha)).epsilon(1e-12));
      CHECK(subordinated_envelope_interval(Order(nu), alpha, 0.2, 0.3, 0.8) ==
            subordinated_envelope_interval(Order(nu), alpha, 0.2, 0.8, 0.3));
    }
  }
  const double env = subordinated_envelope_interval(Order(0.5), 1.0, 1.0, 0.5, 0.5);
  const double ratio = poisson_closed_form(Order(0.5), 1.0, 0.5, 0.5) / env;
  CHECK(ratio >= 0.1);
  CHECK(ratio <= 10.0);
  CHECK_THROWS_AS(subordinated_envelope_interval(Order(0.0), 2.0, 1.0, 0.5, 0.5), DomainError);
}

TEST_CASE("envelopes vanish at x = 1 and stay finite at x = 0") {
  for (double nu : {-0.5, 0.0, 0.5, 1.0, 1.7}) {
    for (double t : {0.01, 0.5}) {
      double previous = INFINITY;
      for (double x : {0.9, 0.99, 0.999, 0.99999, 1.0}) {
        const double a = heat_envelope_interval(Order(nu), t, x, 0.4, 2.0).upper;
        const double b = subordinated_envelope_interval(Order(nu), 1.0, t, x, 0.4);
        CHECK(a <= previous);
        previous = a;
        if (x == 1.0) {
          CHECK(a == 0.0);
          CHECK(b == 0.0);
        }
      }
      const double near0 = heat_envelope_interval(Order(nu), t, 1e-14, 0.4, 2.0).upper;
      const double at0 = heat_envelope_interval(Order(nu), t, 1e-300, 0.4, 2.0).upper;
      CHECK(std::isfinite(near0));
      CHECK(std::isfinite(at0));
      CHECK(at0 == doctest::Approx(near0).epsilon(1e-10));
      CHECK(std::isfinite(subordinated_envelope_interval(Order(nu), 0.5, t, 1e-300, 1e-300)));
    }
  }
}

TEST_CASE("min form and z/(1+z) form differ by at most 2 per factor") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.001, 0.999);
  for (int i = 0; i < 2000; ++i) {
    const double x = u(rng), y = u(rng), t = u(rng);
    for (double nu : {-0.5, 0.0, 1.0}) {
      const double p = nu + 0.5;
      const double hard = std::pow(std::min(x * y / t, 1.0), p) *
                          std::min((1 - x) * (1 - y) / t, 1.0);
      const double soft = std::pow(soft_min(x * y / t), p) * soft_min((1 - x) * (1 - y) / t);
      const double lead = std::pow(x * y, -p) / std::sqrt(t) * std::exp(-(x - y) * (x - y) / (2 * t));
      CHECK(heat_envelope_interval(Order(nu), t, x, y, 2.0).upper ==
            doctest::Approx(lead * hard).epsilon(1e-12));
      CHECK(hard >= soft);
      CHECK(hard <= std::pow(2.0, p + 1.0) * soft);
    }
  }
}

TEST_CASE("long-time envelope") {
  CHECK(longtime_envelope(Order(0.0), 2.0, 1.0, 1.0, 0.5) == 0.0);
  CHECK(longtime_envelope(Order(0.0), 2.0, 1.0, 0.5, 1.0) == 0.0);
  CHECK(longtime_envelope(Order(-0.5), 2.0, 1.0, 0.0, 0.0) == doctest::Approx(std::exp(-kPiD * kPiD / 4)).epsilon(1e-14));
  CHECK(longtime_envelope(Order(-0.5), 2.0, 1.0, 0.0, 0.0) == doctest::Approx(0.08480).epsilon(1e-4));
  CHECK(longtime_envelope(kPiD, 1.0, 3.0, 0.2, 0.6) == doctest::Approx(0.32 * std::exp(-3 * kPiD)).epsilon(1e-14));
  BasisCache cache;
  for (double alpha : {1.0, 2.0}) {
    auto ratio = [&](double t) {
      return evaluate_kernel({Order(0.5), alpha, t, 0.3, 0.6, 1e-12}, cache).value /
             longtime_envelope(Order(0.5), alpha, t, 0.3, 0.6);
    };
    CHECK(ratio(10.0) == doctest::Approx(ratio(5.0)).epsilon(0.01));
  }
}

TEST_CASE("ball envelopes") {
  for (int d : {1, 2, 3, 5}) {
    const double t = 0.2;
    const EnvelopeBounds b = ball_envelopes(d, 2.0, t, 0.0, 0.0, 0.0, 2.0);
    CHECK(b.lower == doctest::Approx(std::pow(t, -0.5 * d)).epsilon(1e-14));
    CHECK(b.upper == doctest::Approx(std::pow(t, -0.5 * d)).epsilon(1e-14));
    const EnvelopeBounds s = ball_envelopes(d, 1.0, t, 0.3, 0.5, 0.4, 2.0);
    CHECK(s.lower == s.upper);
  }
  // d = 1 with nonnegative coordinates is the nu = -1/2 interval envelope
  for (double x : {0.1, 0.5, 0.8}) {
    for (double y : {0.2, 0.9}) {
      const EnvelopeBounds ball = ball_envelopes(1, 2.0, 0.05, x, y, std::fabs(x - y), 3.0);
      const EnvelopeBounds line = heat_envelope_interval(Order(-0.5), 0.05, x, y, 3.0);
      CHECK(ball.lower == doctest::Approx(line.lower).epsilon(1e-13));
      CHECK(ball.upper == doctest::Approx(line.upper).epsilon(1e-13));
      CHECK(ball_envelopes(1, 1.0, 0.05, x, y, std::fabs(x - y), 3.0).upper ==
            doctest::Approx(subordinated_envelope_interval(Order(-0.5), 1.0, 0.05, x, y)).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(ball_envelopes(3, 2.0, 0.1, 0.1, 0.2, 0.9, 2.0), DomainError);
  CHECK_THROWS_AS(ball_envelopes(3, 2.0, 0.1, 0.5, 0.5, 0.0 - 0.1, 2.0), DomainError);
  CHECK_THROWS_AS(ball_envelopes(3, 2.0, 0.1, 1.2, 0.5, 0.7, 2.0), DomainError);
}

TEST_CASE("free-space bound dominates the d = 1 ball kernel") {
  for (double t : {0.001, 0.05, 0.5, 3.0}) {
    for (double x : {-0.9, -0.2, 0.0, 0.6}) {
      for (double y : {-0.5, 0.1, 0.95}) {
        const double g = ball_heat_kernel_d1(t, x, y).value;
        CHECK(g >= 0.0);
        CHECK(g <= rough_ball_bound(1, t, std::fabs(x - y)) * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("parametric integral: limits and regimes") {
  // B -> 0 decouples: int (1-s^2)^{1/2} = pi/2
  const double A = 1.7, D = 2.9, gamma = 2.0;
  const double q = lemma_int_quadrature(gamma, 0.5, A, 1e-9, D);
  CHECK(q == doctest::Approx(kPiD / 2 / (D * std::pow(A, gamma))).epsilon(1e-8));
  CHECK(q / lemma_int_estimate(gamma, 0.5, A, 1e-9, D) == doctest::Approx(kPiD / 2).epsilon(1e-8));
  // endpoint singularity: int (1-s^2)^{-1/2} = pi
  CHECK(lemma_int_quadrature(1.0, -0.5, A, 1e-12, D) ==
        doctest::Approx(kPiD / (D * A)).epsilon(1e-9));

  CHECK(lemma_case(1.5, 1.0, 3.0) == 2);
  CHECK(lemma_case(1.2, 1.0, 1.3) == 3);
  CHECK(lemma_case(2.5, 1.0, 3.0) == 1);
  const double r2 = lemma_int_quadrature(2.0, 0.5, 1.5, 1.0, 3.0) / lemma_int_estimate(2.0, 0.5, 1.5, 1.0, 3.0);
  const double r3 = lemma_int_quadrature(2.5, 0.0, 1.2, 1.0, 1.3) / lemma_int_estimate(2.5, 0.0, 1.2, 1.0, 1.3);
  CHECK(r2 >= 0.05);
  CHECK(r2 <= 20.0);
  CHECK(r3 >= 0.05);
  CHECK(r3 <= 20.0);

  CHECK_THROWS_AS(lemma_int_estimate(1.0, 0.5, 1.5, 1.0, 3.0), DomainError);
  CHECK_THROWS_AS(lemma_int_quadrature(2.0, 0.5, 1.0, 1.5, 3.0), DomainError);
  CHECK_THROWS_AS(lemma_int_quadrature(2.0, -1.5, 1.5, 1.0, 3.0), DomainError);
}

TEST_CASE("parametric integral against a plain composite rule") {
  // smooth parameters where a brute-force Gauss-Legendre sum is reliable
  const double gamma = 3.0, eta = 1.0, A = 2.0, B = 0.5, D = 4.0;
  double brute = 0.0;
  const int panels = 2000;
  const GaussLegendreRule& rule = gauss_legendre(10);
  for (int p = 0; p < panels; ++p) {
    const double a = -1.0 + 2.0 * p / panels, h = 2.0 / panels;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double s = a + 0.5 * h * (rule.nodes[i] + 1.0);
      brute += 0.5 * h * rule.weights[i] * (1 - s * s) / ((D - B * s) * std::pow(A - B * s, gamma));
    }
  }
  CHECK(lemma_int_quadrature(gamma, eta, A, B, D) == doctest::Approx(brute).epsilon(1e-12));
}
