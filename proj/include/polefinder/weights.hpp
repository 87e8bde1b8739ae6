#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "polefinder/errors.hpp"
#include "polefinder/quadrature.hpp"

namespace polefinder {

using Eigen::ArrayXd;
using Eigen::Index;

namespace detail {

inline void check_weight_domain(double u)
{
  if (!(u >= 0.0) || !(u <= 1.0))
    throw DomainError("weight argument outside [0, 1]");
}

}  // namespace detail

//! Pole-search weight: psi(u) = -u^2 + 35 u^{5/2} / 6 - 29 u^3 / 6
//!                              + 2 u^3 log u.
//! Vanishes at both endpoints (the u = 0 value is the continuous limit).
inline double psi_weight(double u)
{
  detail::check_weight_domain(u);
  if (u == 0.0)
    return 0.0;
  const double u2 = u * u;
  const double u3 = u2 * u;
  return -u2 + 35.0 / 6.0 * u2 * std::sqrt(u) - 29.0 / 6.0 * u3 + 2.0 * u3 * std::log(u);
}

inline double psi_weight_d1(double u)
{
  detail::check_weight_domain(u);
  if (u == 0.0)
    return 0.0;
  const double u2 = u * u;
  return -2.0 * u + 175.0 / 12.0 * u * std::sqrt(u) - 12.5 * u2 + 6.0 * u2 * std::log(u);
}

inline double psi_weight_d2(double u)
{
  detail::check_weight_domain(u);
  if (u == 0.0)
    return -2.0;
  return -2.0 + 175.0 / 8.0 * std::sqrt(u) - 19.0 * u + 12.0 * u * std::log(u);
}

//! Two-step weight: w(u) = u^{1/3} - 9 u^{1/2} / 8.
inline double w_weight(double u)
{
  detail::check_weight_domain(u);
  return std::cbrt(u) - 1.125 * std::sqrt(u);
}

//! Integral constants of a weight function, all computed by adaptive
//! quadrature at construction. varsigma and psi_bar_dd require the first
//! and second derivative and stay NaN when those are unavailable (the
//! two-step weight has a nonintegrable squared derivative, so they are
//! deliberately not computed for it).
struct WeightConstants {
  double h = std::numeric_limits<double>::quiet_NaN();            // -int w(u) log u du
  double varsigma = std::numeric_limits<double>::quiet_NaN();     // int w'(u)^2 du
  double psi_bar_dd = std::numeric_limits<double>::quiet_NaN();   // int w''(u) log u du
  double phi_sq = std::numeric_limits<double>::quiet_NaN();       // 0.5 int w(u)^2 du
  double u2_moment = std::numeric_limits<double>::quiet_NaN();    // int u^2 w(u) du
};

using WeightFn = std::function<double(double)>;

//! Compute the constants of an arbitrary weight on (0, 1). d1/d2 may be
//! empty. Checks the zero-integral condition int_0^1 w = 0 to 1e-8.
inline WeightConstants compute_weight_constants(const WeightFn& eval, const WeightFn& d1,
                                                const WeightFn& d2, double abs_tol = 1e-10)
{
  const double total = integrate_unit(eval, abs_tol);
  if (std::abs(total) > 1e-8)
    throw InvalidWeight("weight does not integrate to zero on (0, 1): integral = " +
                        std::to_string(total));

  WeightConstants c;
  c.h = -integrate_unit([&](double u) { return eval(u) * std::log(u); }, abs_tol);
  c.phi_sq = 0.5 * integrate_unit([&](double u) { const double v = eval(u); return v * v; },
                                  abs_tol);
  c.u2_moment = integrate_unit([&](double u) { return u * u * eval(u); }, abs_tol);
  if (d1)
    c.varsigma = integrate_unit([&](double u) { const double v = d1(u); return v * v; },
                                abs_tol);
  if (d2)
    c.psi_bar_dd = integrate_unit([&](double u) { return d2(u) * std::log(u); }, abs_tol);
  return c;
}

//! A weight function on (0, 1) together with its integral constants.
//! Immutable after construction; cheap to copy and safe to share across
//! threads.
class WeightSpec {
public:
  enum class Id { BuiltinPsi, BuiltinW, UserTabulated };

  //! The built-in pole-search weight.
  static const WeightSpec& builtin_psi()
  {
    static const WeightSpec spec(Id::BuiltinPsi, psi_weight, psi_weight_d1, psi_weight_d2);
    return spec;
  }

  //! The built-in two-step weight.
  static const WeightSpec& builtin_w()
  {
    static const WeightSpec spec(Id::BuiltinW, w_weight, WeightFn(), WeightFn());
    return spec;
  }

  //! Piecewise-cubic interpolant through (u_i, v_i) with strictly
  //! increasing knots in (0, 1). Below the first knot the weight falls
  //! linearly to zero at u = 0; above the last knot it is held constant.
  //! The zero-integral condition is validated; smoothness conditions on
  //! the weight are not.
  static WeightSpec tabulated(const ArrayXd& u, const ArrayXd& v, double abs_tol = 1e-10);

  WeightSpec(Id id, WeightFn eval, WeightFn d1, WeightFn d2, double abs_tol = 1e-10)
    : id_(id)
    , eval_(std::move(eval))
    , d1_(std::move(d1))
    , d2_(std::move(d2))
    , constants_(compute_weight_constants(eval_, d1_, d2_, abs_tol))
  {
    if (!(constants_.h > 0.0))
      throw InvalidWeight("weight constant h = -int w log u du must be positive");
    if (id_ == Id::BuiltinPsi && !(constants_.varsigma > 0.0 && constants_.psi_bar_dd > 0.0))
      throw InvalidWeight("pole-search weight must have positive varsigma and psi_bar_dd");
    if (id_ == Id::BuiltinW && !(constants_.phi_sq > 0.0))
      throw InvalidWeight("two-step weight must have positive phi_sq");
  }

  double operator()(double u) const { return eval_(u); }

  Id id() const { return id_; }
  const WeightConstants& constants() const { return constants_; }
  bool has_derivative() const { return static_cast<bool>(d1_); }

private:
  Id id_;
  WeightFn eval_;
  WeightFn d1_;
  WeightFn d2_;
  WeightConstants constants_;
};

//! Discrete analogue of h: -k^{-1} sum_{p=1}^{k} w(p/k) log(p/k).
//! Converges to constants().h at rate O(1/k); the p = k term contributes
//! nothing since log 1 = 0.
inline double discrete_h_bar(const WeightSpec& spec, Index k)
{
  if (k < 2)
    throw DomainError("discrete_h_bar requires k >= 2");
  double acc = 0.0;
  for (Index p = 1; p < k; ++p) {
    const double u = static_cast<double>(p) / static_cast<double>(k);
    acc += spec(u) * std::log(u);
  }
  return -acc / static_cast<double>(k);
}

namespace detail {

//! Cubic Hermite interpolant with three-point slopes; evaluates value,
//! first and second derivative.
class CubicTable {
public:
  CubicTable(const ArrayXd& u, const ArrayXd& v)
    : u_(u)
    , v_(v)
    , slope_(u.size())
  {
    const Index n = u.size();
    if (n < 2)
      throw InvalidWeight("tabulated weight needs at least two knots");
    for (Index i = 0; i + 1 < n; ++i)
      if (!(u[i + 1] > u[i]))
        throw InvalidWeight("tabulated weight knots must be strictly increasing");
    if (!(u[0] > 0.0) || !(u[n - 1] < 1.0))
      throw InvalidWeight("tabulated weight knots must lie strictly inside (0, 1)");

    slope_[0] = (v[1] - v[0]) / (u[1] - u[0]);
    slope_[n - 1] = (v[n - 1] - v[n - 2]) / (u[n - 1] - u[n - 2]);
    for (Index i = 1; i + 1 < n; ++i)
      slope_[i] = (v[i + 1] - v[i - 1]) / (u[i + 1] - u[i - 1]);
  }

  double value(double x) const { return eval(x, 0); }
  double deriv1(double x) const { return eval(x, 1); }
  double deriv2(double x) const { return eval(x, 2); }

private:
  double eval(double x, int order) const
  {
    const Index n = u_.size();
    if (x <= u_[0]) {
      // Linear descent to zero at the origin.
      const double s = v_[0] / u_[0];
      if (order == 0) return s * x;
      if (order == 1) return s;
      return 0.0;
    }
    if (x >= u_[n - 1]) {
      if (order == 0) return v_[n - 1];
      return 0.0;
    }
    Index lo = 0, hi = n - 1;
    while (hi - lo > 1) {
      const Index mid = (lo + hi) / 2;
      (u_[mid] <= x ? lo : hi) = mid;
    }
    const double h = u_[lo + 1] - u_[lo];
    const double t = (x - u_[lo]) / h;
    const double y0 = v_[lo], y1 = v_[lo + 1];
    const double m0 = slope_[lo] * h, m1 = slope_[lo + 1] * h;
    if (order == 0) {
      const double t2 = t * t, t3 = t2 * t;
      return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 +
             (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1;
    }
    if (order == 1) {
      const double t2 = t * t;
      return ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * m0 +
              (-6 * t2 + 6 * t) * y1 + (3 * t2 - 2 * t) * m1) / h;
    }
    return ((12 * t - 6) * y0 + (6 * t - 4) * m0 + (-12 * t + 6) * y1 + (6 * t - 2) * m1) /
           (h * h);
  }

  ArrayXd u_;
  ArrayXd v_;
  ArrayXd slope_;
};

}  // namespace detail

inline WeightSpec WeightSpec::tabulated(const ArrayXd& u, const ArrayXd& v, double abs_tol)
{
  if (u.size() != v.size())
    throw InvalidWeight("tabulated weight: u and v must have equal length");
  auto table = std::make_shared<detail::CubicTable>(u, v);
  return WeightSpec(
    Id::UserTabulated,
    [table](double x) { detail::check_weight_domain(x); return table->value(x); },
    [table](double x) { detail::check_weight_domain(x); return table->deriv1(x); },
    [table](double x) { detail::check_weight_domain(x); return table->deriv2(x); },
    abs_tol);
}

}  // namespace polefinder
