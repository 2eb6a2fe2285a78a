#pragma once

// The kernels G_t^{nu,alpha}(x, y) = sum_n exp(-t lambda_n^alpha) phi_n(x) phi_n(y)
// on (0,1), their trigonometric/image closed forms for nu = +-1/2, the
// Hankel heat kernel on (0, inf), and semigroup utilities.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fbk/quadrature.hpp"
#include "fbk/spectrum.hpp"

namespace fbk {

struct KernelQuery {
  Order order{0.0};
  double alpha = 2.0;
  double t = 1.0;
  double x = 0.5;
  double y = 0.5;
  double tol = 1e-10;  // relative
};

struct KernelValue {
  double value = 0.0;
  std::size_t terms_used = 0;
  double tail_estimate = 0.0;
};

struct SeriesOptions {
  bool psi = false;           // multiply by (xy)^{nu+1/2}
  bool enforce_t_min = true;  // refuse t < t_min(alpha)
};

/// Tail values are compared against tol * max(|partial sum|, kValueFloor).
inline constexpr double kValueFloor = 1e-300;

/// Smallest t the series route accepts for a given alpha.
double t_min(double alpha);

/// Bound on |sum_{n > N} e^{-t lambda_n^alpha} phi_n(x) phi_n(y)| from the
/// calibrated eigenfunction envelope, summed over doubling blocks. Zeros past
/// the basis capacity are replaced by the McMahon estimate.
double series_tail_bound(const SpectralBasis& basis, double alpha, double t, double x, double y,
                         std::size_t N);

KernelValue kernel_series(const KernelQuery& q, const SpectralBasis& basis,
                          const SeriesOptions& opts = {});

/// Series over the tensor grid xs x ys x ts, sharing each phi_n(point) and
/// exp(-t lambda_n^alpha) across the grid. Result index ((ix*ny)+iy)*nt+it.
std::vector<KernelValue> kernel_series_grid(Order order, double alpha,
                                            std::span<const double> xs,
                                            std::span<const double> ys,
                                            std::span<const double> ts, double tol,
                                            const SpectralBasis& basis,
                                            const SeriesOptions& opts = {});

/// kernel_series against a cache, growing the basis until the truncation fits.
KernelValue evaluate_kernel(const KernelQuery& q, BasisCache& cache,
                            const SeriesOptions& opts = {});
std::vector<KernelValue> evaluate_kernel_grid(Order order, double alpha,
                                              std::span<const double> xs,
                                              std::span<const double> ys,
                                              std::span<const double> ts, double tol,
                                              BasisCache& cache, const SeriesOptions& opts = {});

/// First-index estimate so that truncation at N meets tol for generic x, y.
std::size_t suggested_capacity(double alpha, double t, double tol);

/// G_t^{nu,1} for nu = +-1/2 in closed trigonometric form.
double poisson_closed_form(Order nu_half, double t, double x, double y);

struct ImageSum {
  double value = 0.0;
  double tail_bound = 0.0;  // bound on the omitted images
};

/// G_t^{nu,2} for nu = +-1/2 by the method of images, |j| <= image_count.
ImageSum heat_closed_form(Order nu_half, double t, double x, double y, int image_count = 8);

/// G_t^{nu,2} for nu = +-1/2 as the explicit sine/cosine series (no zero
/// finding, exact eigenvalues); accurate for t bounded away from 0.
double heat_trig_series(Order nu_half, double t, double x, double y);

/// Images for t <= 1/4, trigonometric series above.
double heat_closed_form_auto(Order nu_half, double t, double x, double y);

/// W_t^lambda(x,y) = (xy)^{-lambda+1/2} (2t)^{-1} e^{-(x^2+y^2)/(4t)} I_{lambda-1/2}(xy/(2t)).
double hankel_kernel(double lambda_param, double t, double x, double y);

/// G_t^{nu,1} from G_s^{nu,2} through the 1/2-stable subordinator density,
/// integrated over ln s. Throws ConvergenceError carrying the achieved error.
QuadratureResult subordination_check(const KernelQuery& q, const SpectralBasis& basis);

/// <f, phi_n> in L^2(x^{2nu+1} dx) for n = 1..count.
std::vector<double> project_coefficients(const std::function<double(double)>& f,
                                         const SpectralBasis& basis, std::size_t count,
                                         double rel_tol = 1e-12);

/// sum_n e^{-t lambda_n^alpha} c_n phi_n(x) for the given coefficients.
double apply_semigroup(Order order, double alpha, double t, double x,
                       std::span<const double> coefficients, const SpectralBasis& basis);

/// Same, projecting f onto the first `count` eigenfunctions first.
double apply_semigroup(Order order, double alpha, double t, double x,
                       const std::function<double(double)>& f, std::size_t count,
                       const SpectralBasis& basis);

/// int_0^1 G_t(x, y) y^{2nu+1} dy by adaptive quadrature in y.
QuadratureResult submarkov_mass(const KernelQuery& q_without_y, const SpectralBasis& basis,
                                double rel_tol = 1e-10);

struct Composition {
  double composed = 0.0;  // int_0^1 G_t(x,z) G_s(z,y) z^{2nu+1} dz
  double direct = 0.0;    // G_{t+s}(x,y)
  double quadrature_error = 0.0;
};

/// Chapman-Kolmogorov check of the semigroup property.
Composition semigroup_composition(const KernelQuery& q, double s, const SpectralBasis& basis,
                                  double rel_tol = 1e-10);

}  // namespace fbk
