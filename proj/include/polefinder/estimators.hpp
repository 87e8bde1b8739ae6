#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "polefinder/errors.hpp"
#include "polefinder/spectral.hpp"
#include "polefinder/weights.hpp"

namespace polefinder {

//! Band counts and smoothing spans: (k, k1) drive the pole search, (m, m1)
//! the two-step memory estimator.
struct EstimatorConfig {
  Index k = 0;
  Index k1 = 0;
  Index m = 0;
  Index m1 = 0;
};

namespace detail {

inline Index round_half_up(double x, Index floor_at = 1)
{
  const auto r = static_cast<Index>(std::floor(x + 0.5));
  return r < floor_at ? floor_at : r;
}

}  // namespace detail

//! Default bandwidths for a series of length n.
//!
//! k follows the two published anchors (14 at n = 256, 24 at n = 1024),
//! interpolated/extrapolated linearly in log n and clamped below at 8;
//! k1 = k^{0.6} log log 2k rounded. The two-step band is m = floor(n/4)
//! with m1 = m^{0.6} log log 2m.
inline EstimatorConfig bandwidth_defaults(Index n)
{
  if (n < 64)
    throw SeriesTooShort("bandwidth_defaults requires n >= 64, got " + std::to_string(n));

  const double slope = 10.0 / (std::log(1024.0) - std::log(256.0));
  const double k_line = 14.0 + slope * (std::log(static_cast<double>(n)) - std::log(256.0));

  EstimatorConfig cfg;
  cfg.k = detail::round_half_up(k_line, 8);
  cfg.k1 = detail::round_half_up(std::pow(static_cast<double>(cfg.k), 0.6) *
                                 std::log(std::log(2.0 * static_cast<double>(cfg.k))));
  if (cfg.k + cfg.k1 > n / 2) {
    cfg.k = n / 2 - cfg.k1;
    cfg.k1 = detail::round_half_up(std::pow(static_cast<double>(cfg.k), 0.6) *
                                   std::log(std::log(2.0 * static_cast<double>(cfg.k))));
  }

  cfg.m = n / 4;
  cfg.m1 = detail::round_half_up(std::pow(static_cast<double>(cfg.m), 0.6) *
                                 std::log(std::log(2.0 * static_cast<double>(cfg.m))));
  return cfg;
}

inline void validate_config(const EstimatorConfig& cfg, Index n)
{
  const Index half = n / 2;
  if (cfg.k < 2 || cfg.k1 < 1 || cfg.k + cfg.k1 > half)
    throw BandwidthTooLarge("pole-search bandwidths (k = " + std::to_string(cfg.k) +
                            ", k1 = " + std::to_string(cfg.k1) + ") do not fit n = " +
                            std::to_string(n));
  if (cfg.m < 2 || cfg.m1 < 1 || cfg.m + cfg.m1 > half)
    throw BandwidthTooLarge("two-step bandwidths (m = " + std::to_string(cfg.m) +
                            ", m1 = " + std::to_string(cfg.m1) + ") do not fit n = " +
                            std::to_string(n));
}

//! Weight values w(p/k), p = 1..k, with the discrete normalizer h_bar.
//! Precompute once per (weight, k) and share across profile points.
struct BandWeights {
  ArrayXd values;   // values[p-1] = w(p/k)
  double h_bar = 0.0;
  Index k = 0;
};

inline BandWeights make_band_weights(const WeightSpec& spec, Index k)
{
  if (k < 2)
    throw DomainError("band weights require k >= 2");
  BandWeights band;
  band.k = k;
  band.values.resize(k);
  double acc = 0.0;
  for (Index p = 1; p <= k; ++p) {
    const double u = static_cast<double>(p) / static_cast<double>(k);
    band.values[p - 1] = spec(u);
    acc += band.values[p - 1] * std::log(u);
  }
  band.h_bar = -acc / static_cast<double>(k);
  return band;
}

namespace detail {

//! Symmetrized weighted log-spectral kernel at anchor q:
//!   (2 h_bar k)^{-1} sum_p w_p (log fhat_{fold(q+p)} + log fhat_{fold(q-p)}).
//! Operates on precomputed log ordinates.
inline double weighted_log_alpha(Index q, const ArrayXd& log_fhat, Index n,
                                 const BandWeights& band)
{
  const Index k = band.k;
  double acc = 0.0;
  for (Index p = 1; p <= k; ++p)
    acc += band.values[p - 1] *
           (log_fhat[fold_index(q + p, n)] + log_fhat[fold_index(q - p, n)]);
  return acc / (2.0 * band.h_bar * static_cast<double>(k));
}

}  // namespace detail

//! Memory-parameter profile value at a single Fourier index q.
inline double alpha_hat_at(Index q, const SmoothedSpectrum& fhat, Index k,
                           const WeightSpec& psi = WeightSpec::builtin_psi())
{
  if (k < 2 || k > fhat.half())
    throw BandwidthTooLarge("band count k = " + std::to_string(k) +
                            " outside 2..floor(n/2)");
  const BandWeights band = make_band_weights(psi, k);
  const ArrayXd log_fhat = fhat.floored.log();
  return detail::weighted_log_alpha(q, log_fhat, fhat.n, band);
}

struct AlphaProfile {
  ArrayXd values;   // alpha_hat(lambda_q), q = 0..floor(n/2)
  Index k = 0;
  Index k1 = 0;
  Index n = 0;
};

enum class BoundaryRegime { Interior, AtZero, AtPi };

struct PoleEstimate {
  Index q_hat = 0;
  double lambda_hat = 0.0;
  BoundaryRegime regime = BoundaryRegime::Interior;
  AlphaProfile profile;
};

inline BoundaryRegime regime_of(Index q, Index n)
{
  if (q == 0)
    return BoundaryRegime::AtZero;
  if (n % 2 == 0 && q == n / 2)
    return BoundaryRegime::AtPi;
  return BoundaryRegime::Interior;
}

inline AlphaProfile alpha_profile(const SmoothedSpectrum& fhat, Index k,
                                  const WeightSpec& psi = WeightSpec::builtin_psi())
{
  if (k < 2 || k > fhat.half())
    throw BandwidthTooLarge("band count k = " + std::to_string(k) +
                            " outside 2..floor(n/2)");
  const BandWeights band = make_band_weights(psi, k);
  const ArrayXd log_fhat = fhat.floored.log();

  AlphaProfile profile;
  profile.k = k;
  profile.k1 = fhat.k1;
  profile.n = fhat.n;
  profile.values.resize(fhat.half() + 1);
  for (Index q = 0; q <= fhat.half(); ++q)
    profile.values[q] = detail::weighted_log_alpha(q, log_fhat, fhat.n, band);
  return profile;
}

namespace detail {

//! Argmax over q = 0..floor(n/2); ties broken by the smallest index.
inline Index argmax_smallest(const ArrayXd& values)
{
  Index best = 0;
  for (Index q = 1; q < values.size(); ++q)
    if (values[q] > values[best])
      best = q;
  return best;
}

}  // namespace detail

//! Pole search: argmax of the alpha profile over the folded frequency grid.
inline PoleEstimate pole_search(const SmoothedSpectrum& fhat, Index k,
                                const WeightSpec& psi = WeightSpec::builtin_psi())
{
  PoleEstimate est;
  est.profile = alpha_profile(fhat, k, psi);
  est.q_hat = detail::argmax_smallest(est.profile.values);
  est.lambda_hat = fourier_frequency(est.q_hat, fhat.n);
  est.regime = regime_of(est.q_hat, fhat.n);
  return est;
}

enum class EstimatorVariant { TwoStep, FirstStage, LogPeriodogram };

struct MemoryEstimate {
  double alpha = 0.0;
  EstimatorVariant variant = EstimatorVariant::TwoStep;
  Index anchor_q = 0;
  Index band = 0;     // m (or k for the log-periodogram variant)
  Index smooth = 0;   // m1; 0 where no smoothing is involved

  //! Estimates outside (0, 1) are reported, never clipped; this flag is
  //! the out-of-range warning.
  bool in_model_range() const { return alpha > 0.0 && alpha < 1.0; }
};

//! Two-step memory estimator evaluated on an already-smoothed spectrum.
inline MemoryEstimate two_step_alpha_at(Index q_check, const SmoothedSpectrum& fhat,
                                        Index m, const WeightSpec& w = WeightSpec::builtin_w())
{
  if (m < 2 || m > fhat.half())
    throw BandwidthTooLarge("band count m = " + std::to_string(m) +
                            " outside 2..floor(n/2)");
  const BandWeights band = make_band_weights(w, m);
  const ArrayXd log_fhat = fhat.floored.log();

  MemoryEstimate est;
  est.alpha = detail::weighted_log_alpha(q_check, log_fhat, fhat.n, band);
  est.variant = EstimatorVariant::TwoStep;
  est.anchor_q = q_check;
  est.band = m;
  est.smooth = fhat.k1;
  return est;
}

//! Two-step memory estimator: re-smooth the periodogram with span m1,
//! floor at 1/n, and take the symmetrized weighted log sum at anchor
//! q_check.
inline MemoryEstimate two_step_alpha(Index q_check, const PeriodogramGrid& grid, Index m,
                                     Index m1, const WeightSpec& w = WeightSpec::builtin_w())
{
  if (m1 < 1 || m + m1 > grid.n / 2)
    throw BandwidthTooLarge("two-step bandwidths m = " + std::to_string(m) + ", m1 = " +
                            std::to_string(m1) + " do not fit floor(n/2) = " +
                            std::to_string(grid.n / 2));
  return two_step_alpha_at(q_check, averaged_periodogram(grid, m1), m, w);
}

//! Centered log-band weights phi_j = log j - k^{-1} sum_l log l, together
//! with the regression denominator sum_j phi_j log j.
struct LogBandWeights {
  ArrayXd phi;
  double denom = 0.0;
  Index k = 0;
};

inline LogBandWeights make_log_band_weights(Index k)
{
  if (k < 2)
    throw DomainError("log-periodogram band requires k >= 2");
  LogBandWeights band;
  band.k = k;
  band.phi.resize(k);
  for (Index j = 1; j <= k; ++j)
    band.phi[j - 1] = std::log(static_cast<double>(j));
  band.phi -= band.phi.mean();
  for (Index j = 1; j <= k; ++j)
    band.denom += band.phi[j - 1] * std::log(static_cast<double>(j));
  return band;
}

namespace detail {

//! Log ordinates for the log-periodogram regression. The folded index 0
//! is remapped to 1 (I_0 is pinned to zero, so its logarithm is not
//! usable); the remap only affects anchors within k of the grid ends.
inline ArrayXd log_ordinates_with_remap(const PeriodogramGrid& grid)
{
  ArrayXd logs(grid.half() + 1);
  for (Index ell = 0; ell <= grid.half(); ++ell) {
    const Index use = (ell == 0) ? 1 : ell;
    logs[ell] = std::log(grid.ordinates[use]);
  }
  return logs;
}

inline double log_periodogram_alpha_impl(Index q, const ArrayXd& log_ords, Index n,
                                         const LogBandWeights& band)
{
  double acc = 0.0;
  for (Index j = 1; j <= band.k; ++j)
    acc += band.phi[j - 1] *
           (log_ords[fold_index(q + j, n)] + log_ords[fold_index(q - j, n)]);
  return -acc / (2.0 * band.denom);
}

}  // namespace detail

//! Log-periodogram memory estimator at anchor q (the practitioner
//! comparator). Runs on raw periodogram ordinates, no smoothing or floor.
inline MemoryEstimate log_periodogram_alpha(Index q, const PeriodogramGrid& grid, Index k)
{
  if (k < 2 || k > grid.half())
    throw BandwidthTooLarge("band count k = " + std::to_string(k) +
                            " outside 2..floor(n/2)");
  bool any_positive = false;
  for (Index j = 1; j <= k && !any_positive; ++j) {
    any_positive = grid.ordinates[fold_index(q + j, grid.n)] > 0.0 ||
                   grid.ordinates[fold_index(q - j, grid.n)] > 0.0;
  }
  if (!any_positive)
    throw DegenerateBand("all periodogram ordinates in the band are zero");

  const LogBandWeights band = make_log_band_weights(k);
  const ArrayXd log_ords = detail::log_ordinates_with_remap(grid);

  MemoryEstimate est;
  est.alpha = detail::log_periodogram_alpha_impl(q, log_ords, grid.n, band);
  est.variant = EstimatorVariant::LogPeriodogram;
  est.anchor_q = q;
  est.band = k;
  est.smooth = 0;
  return est;
}

//! Pole search driven by the log-periodogram profile.
inline PoleEstimate log_periodogram_pole(const PeriodogramGrid& grid, Index k)
{
  if (k < 2 || k > grid.half())
    throw BandwidthTooLarge("band count k = " + std::to_string(k) +
                            " outside 2..floor(n/2)");
  if ((grid.ordinates > 0.0).count() == 0)
    throw DegenerateBand("periodogram is identically zero");

  const LogBandWeights band = make_log_band_weights(k);
  const ArrayXd log_ords = detail::log_ordinates_with_remap(grid);

  PoleEstimate est;
  est.profile.k = k;
  est.profile.k1 = 0;
  est.profile.n = grid.n;
  est.profile.values.resize(grid.half() + 1);
  for (Index q = 0; q <= grid.half(); ++q)
    est.profile.values[q] = detail::log_periodogram_alpha_impl(q, log_ords, grid.n, band);
  est.q_hat = detail::argmax_smallest(est.profile.values);
  est.lambda_hat = fourier_frequency(est.q_hat, grid.n);
  est.regime = regime_of(est.q_hat, grid.n);
  return est;
}

struct PipelineResult {
  PoleEstimate pole;
  MemoryEstimate memory;
};

//! Full estimation pipeline: periodogram, first-stage smoothing, pole
//! search, then the two-step memory estimator anchored at the estimated
//! pole.
inline PipelineResult estimate_pipeline(const Eigen::Ref<const Eigen::VectorXd>& x,
                                        const EstimatorConfig& cfg,
                                        const WeightSpec& psi = WeightSpec::builtin_psi(),
                                        const WeightSpec& w = WeightSpec::builtin_w())
{
  validate_series(x, 64);
  validate_config(cfg, x.size());

  const PeriodogramGrid grid = periodogram(x);
  if ((grid.ordinates > 0.0).count() == 0)
    throw DegenerateBand("degenerate input: periodogram is identically zero");

  PipelineResult out;
  out.pole = pole_search(averaged_periodogram(grid, cfg.k1), cfg.k, psi);
  out.memory = two_step_alpha(out.pole.q_hat, grid, cfg.m, cfg.m1, w);
  return out;
}

}  // namespace polefinder
