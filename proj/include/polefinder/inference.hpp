#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "polefinder/errors.hpp"
#include "polefinder/estimators.hpp"
#include "polefinder/normal.hpp"
#include "polefinder/weights.hpp"

namespace polefinder {

//! Asymptotic confidence interval for the pole location. In the interior
//! the normalized estimator is Gaussian; at the boundaries the limit is a
//! half-normal mixture with point mass 1/2 at the boundary, making the
//! interval one-sided.
struct PoleCI {
  double center = 0.0;       // lambda_hat, radians
  double half_width = 0.0;   // one-sided width at the boundaries
  BoundaryRegime regime = BoundaryRegime::Interior;
  double point_mass_at_boundary = 0.0;
  double level = 0.0;
  double psi_variance = 0.0;  // Psi = varsigma / (psi_bar_dd * alpha)^2
  double lo = 0.0;
  double hi = 0.0;
};

inline PoleCI pole_ci(const PoleEstimate& est, double alpha_hat, Index n, Index k,
                      const WeightConstants& psi_constants, double level)
{
  if (!(alpha_hat > 0.0))
    throw AlphaNonPositive("pole_ci needs a positive memory estimate to form Psi");
  if (!(level > 0.5) || !(level < 1.0))
    throw DomainError("confidence level must lie in (0.5, 1)");

  constexpr double pi = std::numbers::pi;
  const double psi_var = psi_constants.varsigma /
                         ((psi_constants.psi_bar_dd * alpha_hat) *
                          (psi_constants.psi_bar_dd * alpha_hat));
  const double scale = 2.0 * pi * std::sqrt(static_cast<double>(k)) /
                       static_cast<double>(n) * std::sqrt(psi_var);

  PoleCI ci;
  ci.center = est.lambda_hat;
  ci.regime = est.regime;
  ci.level = level;
  ci.psi_variance = psi_var;
  switch (est.regime) {
    case BoundaryRegime::Interior:
      ci.point_mass_at_boundary = 0.0;
      ci.half_width = normal_quantile(0.5 * (1.0 + level)) * scale;
      ci.lo = std::max(0.0, ci.center - ci.half_width);
      ci.hi = std::min(pi, ci.center + ci.half_width);
      break;
    case BoundaryRegime::AtZero:
      // Limit law Y I(Y >= 0): P(0) = 1/2, half-normal above, so the
      // one-sided quantile is the plain normal one.
      ci.point_mass_at_boundary = 0.5;
      ci.half_width = normal_quantile(level) * scale;
      ci.lo = 0.0;
      ci.hi = std::min(pi, ci.half_width);
      break;
    case BoundaryRegime::AtPi:
      ci.point_mass_at_boundary = 0.5;
      ci.half_width = normal_quantile(level) * scale;
      ci.lo = std::max(0.0, pi - ci.half_width);
      ci.hi = pi;
      break;
  }
  return ci;
}

//! Optional inputs for the asymptotic bias term: c is the band-growth
//! constant in m = c n^{4/5} and log_g_dd the second derivative of
//! log g at the pole. Neither is identifiable from the data alone.
struct BiasInputs {
  double c = 0.0;
  double log_g_dd = 0.0;
};

struct AlphaCI {
  double center = 0.0;
  double half_width = 0.0;
  double level = 0.0;
  double bias_correction = 0.0;
  double variance = 0.0;  // Phi^2 / h^2, per (2m)^{1/2} units
  double lo = 0.0;
  double hi = 0.0;
};

inline AlphaCI alpha_ci(const MemoryEstimate& est, Index m, const WeightConstants& w_constants,
                        double level, std::optional<BiasInputs> bias = std::nullopt)
{
  if (m < 2)
    throw DomainError("alpha_ci requires m >= 2");
  if (!(level > 0.5) || !(level < 1.0))
    throw DomainError("confidence level must lie in (0.5, 1)");

  AlphaCI ci;
  ci.level = level;
  ci.variance = w_constants.phi_sq / (w_constants.h * w_constants.h);
  ci.half_width =
    normal_quantile(0.5 * (1.0 + level)) * std::sqrt(ci.variance / (2.0 * static_cast<double>(m)));
  if (bias) {
    constexpr double pi = std::numbers::pi;
    ci.bias_correction = 4.0 * pi * pi * std::pow(bias->c, 2.5) * bias->log_g_dd *
                         w_constants.u2_moment /
                         (std::numbers::sqrt2 * w_constants.h *
                          std::sqrt(2.0 * static_cast<double>(m)));
  }
  ci.center = est.alpha - ci.bias_correction;
  ci.lo = ci.center - ci.half_width;
  ci.hi = ci.center + ci.half_width;
  return ci;
}

}  // namespace polefinder
