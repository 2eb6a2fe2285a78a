#pragma once

// Closed-form envelope expressions for the kernels on (0,1) and on the ball,
// plus the parametric integral estimate used for the subordinated bounds.

#include "fbk/specfun.hpp"

namespace fbk {

struct EnvelopeBounds {
  double lower = 0.0;
  double upper = 0.0;
  double constant_c = 1.0;
};

/// (xy)^{-nu-1/2} (xy/t ^ 1)^{nu+1/2} [(1-x)(1-y)/t ^ 1] t^{-1/2} times
/// e^{-c(x-y)^2/t} (lower) or e^{-(x-y)^2/(ct)} (upper).
EnvelopeBounds heat_envelope_interval(Order nu, double t, double x, double y, double c);

/// Comparable expression for 0 < alpha < 2, with R = t^{2/alpha} + (x-y)^2:
/// (xy)^{-nu-1/2} (xy/R ^ 1)^{nu+1/2} [(1-x)(1-y)/R ^ 1] t / R^{(alpha+1)/2}.
double subordinated_envelope_interval(Order nu, double alpha, double t, double x, double y);

/// (1-x)(1-y) e^{-t lambda_1^alpha}.
double longtime_envelope(double lambda1, double alpha, double t, double x, double y);
double longtime_envelope(Order nu, double alpha, double t, double x, double y);

/// Ball B^d envelopes in terms of |x|, |y| and |x - y|. For alpha = 2 the
/// Gaussian pair with constant c; for alpha < 2 the single comparable value
/// is stored in both fields. Throws DomainError for inconsistent geometry.
EnvelopeBounds ball_envelopes(int d, double alpha, double t, double norm_x, double norm_y,
                              double dist, double c);

/// (4 pi t)^{-d/2} e^{-|x-y|^2/(4t)}, the free-space upper bound.
double rough_ball_bound(int d, double t, double dist);

/// 1 / ((D-B) A^{eta+1} (A-B)^{gamma-eta-1}).
double lemma_int_estimate(double gamma, double eta, double A, double B, double D);

/// int_{-1}^{1} (1-s^2)^eta ds / ((D - Bs)(A - Bs)^gamma), adaptive quadrature.
double lemma_int_quadrature(double gamma, double eta, double A, double B, double D);

/// Regime of (A, B, D): 1 if D > A >= 2B, 2 if D >= 2B > A > B, 3 if 2B > D > A > B.
int lemma_case(double A, double B, double D);

}  // namespace fbk
