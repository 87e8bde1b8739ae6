#include <cmath>
#include <complex>
#include <numbers>

#include <doctest.h>

#include "polefinder/rng.hpp"
#include "polefinder/spectral.hpp"

using namespace polefinder;

namespace {

constexpr double kPi = std::numbers::pi;

// Independent O(n^2) oracle for the periodogram, straight from the defining
// sum, on the full grid ell = 0..n-1 and without the I_0 := 0 pinning.
Eigen::ArrayXd periodogram_oracle_full(const Eigen::VectorXd& x)
{
  const Index n = x.size();
  Eigen::ArrayXd out(n);
  for (Index ell = 0; ell < n; ++ell) {
    const double lambda = 2.0 * kPi * static_cast<double>(ell) / static_cast<double>(n);
    std::complex<double> acc(0.0, 0.0);
    for (Index t = 1; t <= n; ++t)
      acc += x[t - 1] * std::exp(std::complex<double>(0.0, static_cast<double>(t) * lambda));
    out[ell] = std::norm(acc) / (2.0 * kPi * static_cast<double>(n));
  }
  return out;
}

Eigen::VectorXd gaussian_series(Index n, std::uint64_t key)
{
  const CounterRng rng(key);
  Eigen::VectorXd x(n);
  for (Index t = 0; t < n; ++t)
    x[t] = rng.normal(static_cast<std::uint64_t>(t));
  return x;
}

}  // namespace

TEST_CASE("fourier_frequency basics")
{
  CHECK(fourier_frequency(0, 8) == 0.0);
  CHECK(fourier_frequency(4, 8) == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(fourier_frequency(2, 8) == doctest::Approx(kPi / 2).epsilon(1e-15));
}

TEST_CASE("fold_index reduces modulo n and reflects")
{
  CHECK(fold_index(-3, 16) == 3);
  CHECK(fold_index(13, 16) == 3);
  CHECK(fold_index(16, 16) == 0);
  CHECK(fold_index(8, 16) == 8);
  // Odd n: indices above (n-1)/2 reflect into 1..(n-1)/2.
  CHECK(fold_index(5, 9) == 4);
  CHECK(fold_index(4, 9) == 4);
  // Every integer lands in 0..floor(n/2) and agrees with the oracle value.
  for (Index n : { Index(7), Index(8), Index(9), Index(16) }) {
    const auto x = gaussian_series(n, 11);
    const auto full = periodogram_oracle_full(x);
    const auto grid = periodogram(x);
    for (Index ell = -2 * n; ell <= 2 * n; ++ell) {
      const Index f = fold_index(ell, n);
      REQUIRE(f >= 0);
      REQUIRE(f <= n / 2);
      const Index raw = ((ell % n) + n) % n;
      CHECK(full[f] == doctest::Approx(full[raw]).epsilon(1e-10));
    }
    (void)grid;
  }
}

TEST_CASE("periodogram of a constant series vanishes")
{
  Eigen::VectorXd x = Eigen::VectorXd::Constant(8, 5.0);
  const auto grid = periodogram(x);
  REQUIRE(grid.ordinates.size() == 5);
  CHECK(grid.ordinates[0] == 0.0);
  for (Index ell = 1; ell <= 4; ++ell)
    CHECK(std::abs(grid.ordinates[ell]) < 1e-12);
}

TEST_CASE("periodogram of a Fourier-frequency cosine")
{
  const Index n = 8;
  Eigen::VectorXd x(n);
  for (Index t = 1; t <= n; ++t)
    x[t - 1] = std::cos(fourier_frequency(2, n) * static_cast<double>(t));
  const auto grid = periodogram(x);
  CHECK(grid.ordinates[2] == doctest::Approx(1.0 / kPi).epsilon(1e-12));
  for (Index ell : { Index(1), Index(3), Index(4) })
    CHECK(std::abs(grid.ordinates[ell]) < 1e-12);
}

TEST_CASE("periodogram of an impulse")
{
  Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
  x[0] = 1.0;
  const auto grid = periodogram(x);
  CHECK(grid.ordinates[1] == doctest::Approx(1.0 / (8.0 * kPi)).epsilon(1e-12));
  CHECK(grid.ordinates[2] == doctest::Approx(1.0 / (8.0 * kPi)).epsilon(1e-12));
}

TEST_CASE("periodogram rejects non-finite input")
{
  Eigen::VectorXd x = Eigen::VectorXd::Ones(16);
  x[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(periodogram(x), NonFiniteInput);
  x[3] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(periodogram(x), NonFiniteInput);
}

TEST_CASE("FFT path agrees with the direct summation oracle")
{
  for (Index n : { Index(8), Index(31), Index(64), Index(256) }) {
    const auto x = gaussian_series(n, 100 + static_cast<std::uint64_t>(n));
    const auto grid = periodogram(x);
    const auto full = periodogram_oracle_full(x);
    for (Index ell = 1; ell <= n / 2; ++ell)
      CHECK(grid.ordinates[ell] == doctest::Approx(full[ell]).epsilon(1e-9));
  }
}

TEST_CASE("Parseval identity on the full grid")
{
  for (Index n : { Index(16), Index(33), Index(128) }) {
    const auto x = gaussian_series(n, 7 + static_cast<std::uint64_t>(n));
    const auto full = periodogram_oracle_full(x);
    const double lhs = 2.0 * kPi / static_cast<double>(n) * full.sum();
    const double rhs = x.squaredNorm() / static_cast<double>(n);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
  }
}

TEST_CASE("periodogram sign and shift invariance")
{
  const auto x = gaussian_series(64, 55);
  const auto base = periodogram(x);
  const auto negated = periodogram(-x);
  for (Index ell = 0; ell <= 32; ++ell)
    CHECK(base.ordinates[ell] == negated.ordinates[ell]);

  const auto shifted = periodogram(x.array() + 37.5);
  for (Index ell = 1; ell <= 32; ++ell)
    CHECK(shifted.ordinates[ell] == doctest::Approx(base.ordinates[ell]).epsilon(1e-10));
  CHECK(shifted.ordinates[0] == 0.0);
}

TEST_CASE("averaged_periodogram with k1 = 0 is the identity")
{
  const auto grid = periodogram(gaussian_series(64, 2));
  const auto smooth = averaged_periodogram(grid, 0);
  for (Index ell = 0; ell <= 32; ++ell)
    CHECK(smooth.raw[ell] == grid.ordinates[ell]);
}

TEST_CASE("averaged_periodogram window arithmetic and edge folding")
{
  PeriodogramGrid grid;
  grid.n = 8;
  grid.ordinates.resize(5);
  grid.ordinates << 0, 1, 2, 3, 4;

  const auto smooth = averaged_periodogram(grid, 1);
  CHECK(smooth.raw[2] == doctest::Approx((1.0 + 2.0 + 3.0) / 3.0).epsilon(1e-15));
  // Left edge: fold(-1) = 1, fold(0) = 0.
  CHECK(smooth.raw[1] == doctest::Approx((0.0 + 1.0 + 2.0) / 3.0).epsilon(1e-15));
  CHECK(smooth.raw[0] == doctest::Approx((1.0 + 0.0 + 1.0) / 3.0).epsilon(1e-15));
  // Right edge: fold(5) = 3.
  CHECK(smooth.raw[4] == doctest::Approx((3.0 + 4.0 + 3.0) / 3.0).epsilon(1e-15));
}

TEST_CASE("averaged_periodogram floors at 1/n")
{
  PeriodogramGrid grid;
  grid.n = 8;
  grid.ordinates = Eigen::ArrayXd::Zero(5);
  grid.ordinates[3] = 2.0;
  const auto smooth = averaged_periodogram(grid, 1);
  for (Index ell = 0; ell <= 4; ++ell) {
    CHECK(smooth.floored[ell] >= 1.0 / 8.0);
    CHECK(smooth.floored[ell] == std::max(smooth.raw[ell], 1.0 / 8.0));
  }
}

TEST_CASE("averaged_periodogram rejects oversized bandwidth")
{
  const auto grid = periodogram(gaussian_series(64, 3));
  CHECK_THROWS_AS(averaged_periodogram(grid, 17), BandwidthTooLarge);
  CHECK_NOTHROW(averaged_periodogram(grid, 16));
}
