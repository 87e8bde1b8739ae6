#include <cmath>
#include <numbers>

#include <doctest.h>

#include "polefinder/estimators.hpp"
#include "polefinder/rng.hpp"

using namespace polefinder;

namespace {

constexpr double kPi = std::numbers::pi;

//! Independent re-evaluation of the profile statistic straight from its
//! defining formula, sharing no code with the implementation kernel.
double alpha_profile_oracle(Index q, const SmoothedSpectrum& fhat, Index k)
{
  const Index n = fhat.n;
  auto fold = [n](Index ell) {
    Index r = ell % n;
    if (r < 0) r += n;
    return r > n / 2 ? n - r : r;
  };
  double h_bar = 0.0;
  for (Index p = 1; p <= k; ++p)
    h_bar -= psi_weight(static_cast<double>(p) / k) * std::log(static_cast<double>(p) / k);
  h_bar /= static_cast<double>(k);
  double acc = 0.0;
  for (Index p = 1; p <= k; ++p)
    acc += psi_weight(static_cast<double>(p) / k) *
           (std::log(fhat.floored[fold(q + p)]) + std::log(fhat.floored[fold(q - p)]));
  return acc / (2.0 * h_bar * static_cast<double>(k));
}

SmoothedSpectrum make_spectrum(Index n, const ArrayXd& floored, Index k1 = 0)
{
  SmoothedSpectrum fhat;
  fhat.n = n;
  fhat.k1 = k1;
  fhat.raw = floored;
  fhat.floored = floored;
  return fhat;
}

}  // namespace

TEST_CASE("bandwidth_defaults at the published anchors")
{
  const auto c256 = bandwidth_defaults(256);
  CHECK(c256.k == 14);
  CHECK(c256.k1 == 6);
  CHECK(c256.m == 64);
  CHECK(c256.m1 == 19);

  const auto c1024 = bandwidth_defaults(1024);
  CHECK(c1024.k == 24);
  CHECK(c1024.k1 == 9);
  CHECK(c1024.m == 256);
  CHECK(c1024.m1 == 51);
}

TEST_CASE("bandwidth_defaults interpolates in log n and clamps")
{
  CHECK(bandwidth_defaults(512).k == 19);
  CHECK(bandwidth_defaults(64).k == 8);  // extrapolated line clamped below
  CHECK(bandwidth_defaults(4096).k == 34);
  CHECK_THROWS_AS(bandwidth_defaults(63), SeriesTooShort);
  for (Index n : { Index(64), Index(100), Index(300), Index(2048) }) {
    const auto cfg = bandwidth_defaults(n);
    CHECK_NOTHROW(validate_config(cfg, n));
  }
}

TEST_CASE("alpha_hat_at is zero on a flat spectrum")
{
  const auto fhat = make_spectrum(256, ArrayXd::Ones(129));
  CHECK(alpha_hat_at(0, fhat, 14) == 0.0);
  CHECK(alpha_hat_at(64, fhat, 14) == 0.0);
}

TEST_CASE("alpha_hat_at constant spectrum gives a q-independent offset")
{
  const double c = 3.7;
  const auto fhat = make_spectrum(256, ArrayXd::Constant(129, c));
  const Index k = 14;
  const auto band = make_band_weights(WeightSpec::builtin_psi(), k);
  const double expected = std::log(c) * band.values.sum() / (band.h_bar * k);
  for (Index q : { Index(0), Index(13), Index(64), Index(128) })
    CHECK(alpha_hat_at(q, fhat, k) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("exact recovery identities for the profile and two-step kernels")
{
  const Index n = 1024, q = 256;
  for (Index k : { Index(8), Index(16), Index(32), Index(64) }) {
    for (double alpha : { 0.2, 0.4, 0.6, 0.8 }) {
      ArrayXd floored = ArrayXd::Ones(n / 2 + 1);
      for (Index p = 1; p <= k; ++p) {
        const double v = std::pow(fourier_frequency(p, n), -alpha);
        floored[q + p] = v;
        floored[q - p] = v;
      }
      const auto fhat = make_spectrum(n, floored);

      const auto psi_band = make_band_weights(WeightSpec::builtin_psi(), k);
      const double psi_closed =
        alpha * (1.0 - std::log(2.0 * kPi * k / n) * psi_band.values.sum() /
                         (psi_band.h_bar * static_cast<double>(k)));
      CHECK(alpha_hat_at(q, fhat, k) == doctest::Approx(psi_closed).epsilon(1e-10));

      const auto w_band = make_band_weights(WeightSpec::builtin_w(), k);
      const double w_closed =
        alpha * (1.0 - std::log(2.0 * kPi * k / n) * w_band.values.sum() /
                         (w_band.h_bar * static_cast<double>(k)));
      CHECK(two_step_alpha_at(q, fhat, k).alpha == doctest::Approx(w_closed).epsilon(1e-10));
    }
  }
}

TEST_CASE("pole_search matches the brute-force oracle on a synthetic capped pole")
{
  const Index n = 1024, s = 128, k = 24;
  ArrayXd floored(n / 2 + 1);
  const double cap = std::pow(static_cast<double>(n), 0.8);
  for (Index ell = 0; ell <= n / 2; ++ell) {
    const double d = std::abs(fourier_frequency(ell, n) - fourier_frequency(s, n));
    floored[ell] = ell == s ? cap : std::pow(d, -0.8);
  }
  const auto fhat = make_spectrum(n, floored);

  const auto est = pole_search(fhat, k);

  Index oracle_best = 0;
  double oracle_val = alpha_profile_oracle(0, fhat, k);
  for (Index q = 1; q <= n / 2; ++q) {
    const double v = alpha_profile_oracle(q, fhat, k);
    if (v > oracle_val) {
      oracle_val = v;
      oracle_best = q;
    }
  }
  CHECK(oracle_best == est.q_hat);
  // The profile of this capped single-ordinate spike genuinely peaks where
  // the spike sits under the weight maximum, not at the spike itself: the
  // oracle puts the argmax 10 indices left of s.
  CHECK(est.q_hat == 118);
  CHECK(est.regime == BoundaryRegime::Interior);
  CHECK(est.lambda_hat == doctest::Approx(fourier_frequency(est.q_hat, n)).epsilon(1e-15));
  for (Index q : { Index(0), Index(64), Index(128), Index(400) })
    CHECK(est.profile.values[q] ==
          doctest::Approx(alpha_profile_oracle(q, fhat, k)).epsilon(1e-12));
}

TEST_CASE("pole_search breaks ties at the smallest index")
{
  const auto fhat = make_spectrum(64, ArrayXd::Ones(33));
  const auto est = pole_search(fhat, 8);
  CHECK(est.q_hat == 0);
  CHECK(est.regime == BoundaryRegime::AtZero);
  CHECK((est.profile.values == 0.0).all());
}

TEST_CASE("argmax is invariant to positive rescaling while the floor is inactive")
{
  const CounterRng rng(321);
  const Index n = 512;
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    ArrayXd floored(n / 2 + 1);
    for (Index ell = 0; ell <= n / 2; ++ell) {
      const double z = rng.normal(trial * 1000 + static_cast<std::uint64_t>(ell));
      floored[ell] = 0.5 + z * z;  // stays above 1/n
    }
    const auto base = pole_search(make_spectrum(n, floored), 16);
    const auto scaled = pole_search(make_spectrum(n, ArrayXd(floored * 7.3)), 16);
    CHECK(base.q_hat == scaled.q_hat);
  }
}

TEST_CASE("profile stays finite when the floor is active")
{
  PeriodogramGrid grid;
  grid.n = 128;
  grid.ordinates = ArrayXd::Zero(65);
  grid.ordinates[10] = 4.0;
  const auto fhat = averaged_periodogram(grid, 3);
  const auto profile = alpha_profile(fhat, 8);
  CHECK(profile.values.allFinite());
}

TEST_CASE("two_step_alpha validates its bandwidths and is zero on a flat band")
{
  PeriodogramGrid grid;
  grid.n = 1024;
  grid.ordinates = ArrayXd::Ones(513);
  grid.ordinates[0] = 0.0;
  CHECK_THROWS_AS(two_step_alpha(256, grid, 500, 50, WeightSpec::builtin_w()),
                  BandwidthTooLarge);
  CHECK_THROWS_AS(two_step_alpha(256, grid, 64, 0, WeightSpec::builtin_w()),
                  BandwidthTooLarge);
  // Anchored mid-grid, the band and its smoothing windows never touch the
  // pinned I_0, so the flat spectrum gives exactly zero.
  const auto est = two_step_alpha(256, grid, 64, 19);
  CHECK(est.alpha == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(est.variant == EstimatorVariant::TwoStep);
  CHECK(est.anchor_q == 256);
  CHECK(est.band == 64);
  CHECK(est.smooth == 19);
}

TEST_CASE("log band weights are centered and k >= 2 enforced")
{
  for (Index k : { Index(2), Index(8), Index(14), Index(64), Index(256) }) {
    const auto band = make_log_band_weights(k);
    CHECK(std::abs(band.phi.sum()) < 1e-12);
    CHECK(band.denom > 0.0);
  }
  CHECK_THROWS_AS(make_log_band_weights(1), DomainError);
}

TEST_CASE("log_periodogram_alpha annihilates constants and recovers alpha exactly")
{
  const Index n = 256, q = 64, k = 32;
  PeriodogramGrid grid;
  grid.n = n;
  grid.ordinates = ArrayXd::Constant(n / 2 + 1, 2.5);
  grid.ordinates[0] = 0.0;
  CHECK(log_periodogram_alpha(q, grid, k).alpha == doctest::Approx(0.0).epsilon(1e-12));

  for (double alpha : { 0.2, 0.4, 0.6, 0.8 }) {
    PeriodogramGrid exact;
    exact.n = n;
    exact.ordinates = ArrayXd::Ones(n / 2 + 1);
    exact.ordinates[0] = 0.0;
    for (Index j = 1; j <= k; ++j) {
      const double v = std::pow(fourier_frequency(j, n), -alpha);
      exact.ordinates[q + j] = v;
      exact.ordinates[q - j] = v;
    }
    const auto est = log_periodogram_alpha(q, exact, k);
    CHECK(est.alpha == doctest::Approx(alpha).epsilon(1e-10));
    CHECK(est.variant == EstimatorVariant::LogPeriodogram);
  }
}

TEST_CASE("log_periodogram_alpha remaps a folded zero index to one")
{
  const Index n = 64, k = 4;
  PeriodogramGrid grid;
  grid.n = n;
  grid.ordinates = ArrayXd::Ones(33);
  grid.ordinates[0] = 0.0;
  grid.ordinates[1] = std::exp(1.0);
  // Anchor q = 2: the band hits fold(q - j) = 0 at j = 2, which remaps to
  // index 1; changing I_1 therefore changes the estimate.
  const double with_e = log_periodogram_alpha(2, grid, k).alpha;
  grid.ordinates[1] = 1.0;
  const double without = log_periodogram_alpha(2, grid, k).alpha;
  CHECK(with_e != doctest::Approx(without).epsilon(1e-12));
}

TEST_CASE("log_periodogram_alpha flags an all-zero band")
{
  PeriodogramGrid grid;
  grid.n = 64;
  grid.ordinates = ArrayXd::Zero(33);
  grid.ordinates[20] = 1.0;  // outside the q = 4, k = 3 band
  CHECK_THROWS_AS(log_periodogram_alpha(4, grid, 3), DegenerateBand);
}

TEST_CASE("log_periodogram_pole on synthetic data")
{
  const Index n = 256, s = 64, k = 14;
  PeriodogramGrid grid;
  grid.n = n;
  grid.ordinates = ArrayXd::Ones(n / 2 + 1);
  grid.ordinates[0] = 0.0;
  for (Index ell = 1; ell <= n / 2; ++ell) {
    const double d = std::abs(fourier_frequency(ell, n) - fourier_frequency(s, n));
    grid.ordinates[ell] = ell == s ? std::pow(n, 0.8) : std::pow(d, -0.8);
  }

  // Independent brute-force argmax of the defining regression formula.
  const ArrayXd log_j =
    ArrayXd::LinSpaced(k, 1.0, static_cast<double>(k)).log();
  const ArrayXd phi = log_j - log_j.mean();
  const double denom = (phi * log_j).sum();
  Index oracle_best = 0;
  double oracle_val = -1e300;
  for (Index q = 0; q <= n / 2; ++q) {
    double acc = 0.0;
    for (Index j = 1; j <= k; ++j) {
      Index a = fold_index(q + j, n);
      Index b = fold_index(q - j, n);
      if (a == 0) a = 1;
      if (b == 0) b = 1;
      acc += phi[j - 1] * (std::log(grid.ordinates[a]) + std::log(grid.ordinates[b]));
    }
    acc = -acc / (2.0 * denom);
    if (acc > oracle_val) {
      oracle_val = acc;
      oracle_best = q;
    }
  }
  const auto tilde = log_periodogram_pole(grid, k);
  CHECK(tilde.q_hat == oracle_best);
  // As with the smoothed profile, the single capped ordinate pulls the
  // argmax one index off the spike on this synthetic input.
  CHECK(tilde.q_hat == 63);

  PeriodogramGrid flat;
  flat.n = n;
  flat.ordinates = ArrayXd::Ones(n / 2 + 1);
  flat.ordinates[0] = 0.0;
  CHECK(log_periodogram_pole(flat, k).q_hat == 0);  // all-equal profile, tie-break

  PeriodogramGrid zero;
  zero.n = n;
  zero.ordinates = ArrayXd::Zero(n / 2 + 1);
  CHECK_THROWS_AS(log_periodogram_pole(zero, k), DegenerateBand);
}

TEST_CASE("estimate_pipeline surfaces degenerate input")
{
  const Eigen::VectorXd constant = Eigen::VectorXd::Constant(256, 2.0);
  CHECK_THROWS_AS(estimate_pipeline(constant, bandwidth_defaults(256)), DegenerateBand);
  CHECK_THROWS_AS(estimate_pipeline(Eigen::VectorXd::Zero(32), bandwidth_defaults(256)),
                  SeriesTooShort);
}

TEST_CASE("estimate_pipeline near-null memory estimate on white noise")
{
  const Index n = 1024;
  const auto cfg = bandwidth_defaults(n);
  const int reps = 500;
  double mean = 0.0;
  for (int r = 0; r < reps; ++r) {
    const CounterRng rng(derive_key(2024, static_cast<std::uint64_t>(r)));
    Eigen::VectorXd x(n);
    for (Index t = 0; t < n; ++t)
      x[t] = rng.normal(static_cast<std::uint64_t>(t));
    mean += estimate_pipeline(x, cfg).memory.alpha;
  }
  mean /= reps;
  CHECK(std::abs(mean) < 0.15);
}
