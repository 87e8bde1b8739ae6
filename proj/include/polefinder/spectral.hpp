#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "polefinder/errors.hpp"

namespace polefinder {

using Eigen::ArrayXd;
using Eigen::Index;

namespace detail {

//! Thread-local FFT engine; plans are cached per transform size.
inline Eigen::FFT<double>& fft_engine()
{
  thread_local Eigen::FFT<double> engine;
  return engine;
}

}  // namespace detail

//! Fourier frequency lambda_ell = 2*pi*ell / n, in radians.
inline double fourier_frequency(Index ell, Index n)
{
  return 2.0 * std::numbers::pi * static_cast<double>(ell) / static_cast<double>(n);
}

//! Canonical periodogram index: reduce ell modulo n, then reflect indices
//! above floor(n/2) back by even symmetry. I_{fold(ell)} = I_ell for every
//! integer ell.
inline Index fold_index(Index ell, Index n)
{
  Index r = ell % n;
  if (r < 0)
    r += n;
  if (r > n / 2)
    r = n - r;
  return r;
}

//! Periodogram ordinates I_0..I_{floor(n/2)}; I_0 is pinned to zero, which
//! is the sample-mean correction (mean subtraction has no effect at the
//! nonzero Fourier frequencies).
struct PeriodogramGrid {
  ArrayXd ordinates;
  Index n = 0;

  Index half() const { return ordinates.size() - 1; }
};

//! Averaged periodogram over a (2*k1 + 1)-wide window, with the positivity
//! floor applied after averaging: floored = max(raw, 1/n).
struct SmoothedSpectrum {
  ArrayXd raw;
  ArrayXd floored;
  Index k1 = 0;
  Index n = 0;

  Index half() const { return floored.size() - 1; }
};

inline void validate_series(const Eigen::Ref<const Eigen::VectorXd>& x, Index min_n = 1)
{
  if (x.size() < min_n)
    throw SeriesTooShort("series has " + std::to_string(x.size()) +
                         " observations, need at least " + std::to_string(min_n));
  if (!x.allFinite())
    throw NonFiniteInput("series contains NaN or infinite values");
}

//! Periodogram of x on the Fourier grid, I_ell = |(2*pi*n)^{-1/2} sum_t x_t
//! e^{i t lambda_ell}|^2, computed with an n-point DFT.
inline PeriodogramGrid periodogram(const Eigen::Ref<const Eigen::VectorXd>& x)
{
  validate_series(x);
  const Index n = x.size();

  Eigen::VectorXcd spectrum(n);
  detail::fft_engine().fwd(spectrum.data(), x.data(), n);

  const double scale = 1.0 / (2.0 * std::numbers::pi * static_cast<double>(n));
  PeriodogramGrid grid;
  grid.n = n;
  grid.ordinates = ArrayXd::Zero(n / 2 + 1);
  for (Index ell = 1; ell <= n / 2; ++ell)
    grid.ordinates[ell] = std::norm(spectrum[ell]) * scale;
  return grid;
}

//! Moving average of 2*k1 + 1 periodogram ordinates. Indices outside
//! 0..floor(n/2) are resolved by fold_index, so the folded I_0 = 0 enters
//! windows near the origin.
inline SmoothedSpectrum averaged_periodogram(const PeriodogramGrid& grid, Index k1)
{
  const Index n = grid.n;
  if (k1 < 0 || k1 > n / 4)
    throw BandwidthTooLarge("smoothing bandwidth k1 = " + std::to_string(k1) +
                            " exceeds floor(n/4) = " + std::to_string(n / 4));

  const Index half = grid.half();
  SmoothedSpectrum out;
  out.k1 = k1;
  out.n = n;
  out.raw.resize(half + 1);
  const double inv_width = 1.0 / static_cast<double>(2 * k1 + 1);
  for (Index ell = 0; ell <= half; ++ell) {
    double acc = 0.0;
    for (Index j = -k1; j <= k1; ++j)
      acc += grid.ordinates[fold_index(ell + j, n)];
    out.raw[ell] = acc * inv_width;
  }
  out.floored = out.raw.max(1.0 / static_cast<double>(n));
  return out;
}

}  // namespace polefinder
