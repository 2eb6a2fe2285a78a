#pragma once

// Radial reduction between the ball B^d and the interval (0,1): sphere
// integrals of zonal functions, the Gaussian sphere identity, and the exact
// d = 1 comparison through image kernels on (-1, 1).

#include <functional>
#include <span>

#include "fbk/kernels.hpp"
#include "fbk/quadrature.hpp"
#include "fbk/specfun.hpp"

namespace fbk {

/// Surface area of S^{d-1} in R^d, 2 pi^{d/2} / Gamma(d/2).
double sphere_area(int d);

struct SphereIntegrand {
  int dimension = 1;
  std::function<double(double)> profile;  // of the zonal coordinate xi_1
};

/// Integral of a zonal function over S^{d-1}: the two-point sum for d = 1,
/// otherwise sigma(S^{d-2}) int_0^pi profile(cos th) sin^{d-2} th dth.
QuadratureResult zonal_integral(const SphereIntegrand& f, double rel_tol = 1e-12);

/// int_{S^{d-1}} exp(-|x e_1 - y xi|^2 / (ct)) d sigma(xi) by zonal quadrature.
QuadratureResult gaussian_sphere_quadrature(int d, double x, double y, double t, double c);

/// (2 pi)^{nu+1} e^{-(x^2+y^2)/(ct)} (ct/(2xy))^nu I_nu(2xy/(ct)), nu = d/2 - 1.
double gaussian_sphere_closed(int d, double x, double y, double t, double c);

/// I_nu(z) through z^nu / (sqrt(pi) 2^nu Gamma(nu+1/2)) int_0^pi e^{z cos th} sin^{2nu} th dth.
double schlafli_bessel_i(Order nu, double z);

/// Image count max(8, ceil(4/sqrt(t))), raised further until the Gaussian
/// tail certificate drops below 1e-17 of the leading image.
int ball_image_count(double t);

/// Dirichlet heat kernel of (-1, 1) by images of period 4.
ImageSum ball_heat_kernel_d1(double t, double x, double y);

/// Dirichlet kernel of (-1, 1) for alpha in {1, 2}; alpha = 1 integrates the
/// image heat kernel against the 1/2-stable subordinator density.
double ball_kernel_d1(double alpha, double t, double x, double y);

struct TransferencePair {
  double lhs = 0.0;  // interval kernel, nu = -1/2, by the series
  double rhs = 0.0;  // ball kernel summed over S^0 = {-1, +1}
  double rel_err = 0.0;
};

TransferencePair interval_transference_check(double alpha, double t, double x, double y,
                                             BasisCache& cache);

/// <F, G> in L^2(B^d) by a product Gauss-Legendre rule in hyperspherical
/// coordinates (radius plus d-1 angles), `points` nodes per coordinate.
double ball_inner_product(int d, const std::function<double(std::span<const double>)>& F,
                          const std::function<double(std::span<const double>)>& G,
                          int points = 24);

}  // namespace fbk
