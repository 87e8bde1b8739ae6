#pragma once

#include <cmath>
#include <utility>

#include "polefinder/errors.hpp"

namespace polefinder {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

namespace detail {

// 15-point Kronrod rule with embedded 7-point Gauss rule on [-1, 1].
constexpr double kKronrodNodes[8] = {
  0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
  0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0
};
constexpr double kKronrodWeights[8] = {
  0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
  0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728
};
// Gauss weights for Kronrod nodes 1, 3, 5, 7.
constexpr double kGaussWeights[4] = {
  0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469
};

template <typename F>
QuadratureResult gauss_kronrod_15(F&& f, double a, double b)
{
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);

  double kronrod = kKronrodWeights[7] * f(mid);
  double gauss = kGaussWeights[3] * f(mid);
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    const double fsum = f(mid - dx) + f(mid + dx);
    kronrod += kKronrodWeights[i] * fsum;
    if (i % 2 == 1)
      gauss += kGaussWeights[i / 2] * fsum;
  }
  return { kronrod * half, std::abs((kronrod - gauss) * half) };
}

template <typename F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double abs_tol, int depth)
{
  const QuadratureResult r = gauss_kronrod_15(f, a, b);
  if (r.error_estimate <= abs_tol || !(std::abs(b - a) > 0.0))
    return r;
  if (depth <= 0)
    throw QuadratureFailure("adaptive quadrature: tolerance not reached");
  const double mid = 0.5 * (a + b);
  const QuadratureResult left = integrate_adaptive(f, a, mid, 0.5 * abs_tol, depth - 1);
  const QuadratureResult right = integrate_adaptive(f, mid, b, 0.5 * abs_tol, depth - 1);
  return { left.value + right.value, left.error_estimate + right.error_estimate };
}

}  // namespace detail

//! Adaptive Gauss-Kronrod integration of f over [a, b] to absolute
//! tolerance abs_tol. Endpoints are never evaluated.
template <typename F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-10)
{
  if (!(abs_tol > 0.0))
    throw DomainError("integrate: abs_tol must be positive");
  return detail::integrate_adaptive(std::forward<F>(f), a, b, abs_tol, 60).value;
}

//! Integration over (0, 1) under the substitution u = t^3, which tames
//! integrable endpoint singularities at the origin (log u, fractional
//! powers) that plain bisection cannot resolve to tight tolerances.
template <typename F>
double integrate_unit(F&& f, double abs_tol = 1e-10)
{
  return integrate([&](double t) { return 3.0 * t * t * f(t * t * t); }, 0.0, 1.0, abs_tol);
}

}  // namespace polefinder
