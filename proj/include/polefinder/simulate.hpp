#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "polefinder/errors.hpp"
#include "polefinder/rng.hpp"
#include "polefinder/spectral.hpp"

namespace polefinder {

inline void validate_memory_parameter(double alpha)
{
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw DomainError("memory parameter alpha must lie in (0, 1), got " +
                      std::to_string(alpha));
}

//! Autocorrelations of the fractional model with pole at zero:
//! rho_0 = 1, rho_j = (j - 1 + alpha/2) / (j - alpha/2) * rho_{j-1}.
inline ArrayXd autocorr_farima(double alpha, Index maxlag)
{
  validate_memory_parameter(alpha);
  const double d = 0.5 * alpha;
  ArrayXd rho(maxlag + 1);
  rho[0] = 1.0;
  for (Index j = 1; j <= maxlag; ++j)
    rho[j] = (static_cast<double>(j) - 1.0 + d) / (static_cast<double>(j) - d) * rho[j - 1];
  return rho;
}

//! Autocorrelations of the Gegenbauer model with pole at pi/2: odd lags
//! vanish, rho_{2j} = (1 - j - alpha/2) / (j - alpha/2) * rho_{2(j-1)}.
inline ArrayXd autocorr_gegenbauer_halfpi(double alpha, Index maxlag)
{
  validate_memory_parameter(alpha);
  const double d = 0.5 * alpha;
  ArrayXd rho = ArrayXd::Zero(maxlag + 1);
  rho[0] = 1.0;
  for (Index j = 1; 2 * j <= maxlag; ++j)
    rho[2 * j] = (1.0 - static_cast<double>(j) - d) / (static_cast<double>(j) - d) *
                 rho[2 * (j - 1)];
  return rho;
}

//! Alternating-sign transform rho_j -> (-1)^j rho_j; corresponds to
//! x_t -> (-1)^t x_t and moves a spectral pole from 0 to pi.
inline ArrayXd spectral_flip(const ArrayXd& rho)
{
  ArrayXd out = rho;
  for (Index j = 1; j < out.size(); j += 2)
    out[j] = -out[j];
  return out;
}

//! Eigenvalues of the 2n-circulant embedding of a correlation sequence.
struct EmbeddingSpectrum {
  ArrayXd eigenvalues;   // length 2n, all >= 0 after round-off clipping
  double min_eigenvalue = 0.0;  // before clipping
  Index n = 0;
};

//! Build the circulant embedding (rho_0, ..., rho_n, rho_{n-1}, ..., rho_1)
//! and transform it to eigenvalues. Tiny negative eigenvalues within
//! 1e-10 of the largest magnitude are round-off and clipped to zero;
//! anything below that means the sequence is not embeddable at this
//! length.
inline EmbeddingSpectrum circulant_embedding(const ArrayXd& rho, Index n)
{
  if (n < 1)
    throw DomainError("circulant_embedding requires n >= 1");
  if (rho.size() < n + 1)
    throw DomainError("circulant_embedding needs lags 0..n, got maxlag = " +
                      std::to_string(rho.size() - 1));

  const Index m = 2 * n;
  Eigen::VectorXd row(m);
  for (Index j = 0; j <= n; ++j)
    row[j] = rho[j];
  for (Index j = n + 1; j < m; ++j)
    row[j] = rho[m - j];

  Eigen::VectorXcd spectrum(m);
  detail::fft_engine().fwd(spectrum.data(), row.data(), m);

  EmbeddingSpectrum emb;
  emb.n = n;
  emb.eigenvalues.resize(m);
  double max_eig = 0.0;
  double max_imag = 0.0;
  for (Index j = 0; j < m; ++j) {
    emb.eigenvalues[j] = spectrum[j].real();
    max_eig = std::max(max_eig, emb.eigenvalues[j]);
    max_imag = std::max(max_imag, std::abs(spectrum[j].imag()));
  }
  emb.min_eigenvalue = emb.eigenvalues.minCoeff();

  if (max_imag > 1e-9 * max_eig)
    throw NotEmbeddable("circulant eigenvalues are not numerically real");
  if (emb.min_eigenvalue < -1e-10 * max_eig)
    throw NotEmbeddable("autocovariance is not embeddable at length 2n = " +
                        std::to_string(m) + " (min eigenvalue " +
                        std::to_string(emb.min_eigenvalue) + ")");
  emb.eigenvalues = emb.eigenvalues.max(0.0);
  return emb;
}

//! Draw one exact stationary Gaussian path from a precomputed embedding.
//! Deviate j of the seed's stream is always attached to spectral slot j,
//! so output is independent of thread count and evaluation order.
inline Eigen::VectorXd davies_harte(const EmbeddingSpectrum& emb, std::uint64_t seed)
{
  const Index n = emb.n;
  const Index m = 2 * n;
  const CounterRng rng(seed);

  Eigen::VectorXcd coeffs(m);
  coeffs[0] = std::sqrt(emb.eigenvalues[0]) * rng.normal(0);
  if (n >= 1)
    coeffs[n] = std::sqrt(emb.eigenvalues[n]) * rng.normal(static_cast<std::uint64_t>(n));
  for (Index j = 1; j < n; ++j) {
    const double amp = std::sqrt(0.5 * emb.eigenvalues[j]);
    const std::complex<double> z(rng.normal(static_cast<std::uint64_t>(j)),
                                 rng.normal(static_cast<std::uint64_t>(m - j)));
    coeffs[j] = amp * z;
    coeffs[m - j] = std::conj(coeffs[j]);
  }

  Eigen::VectorXcd path(m);
  detail::fft_engine().fwd(path.data(), coeffs.data(), m);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  return path.head(n).real() * scale;
}

inline Eigen::VectorXd davies_harte(const ArrayXd& rho, Index n, std::uint64_t seed)
{
  return davies_harte(circulant_embedding(rho, n), seed);
}

enum class Family { Farima, GegenbauerHalfPi, FlippedPi };

//! Pole location implied by the model family, in radians.
inline double pole_location(Family family)
{
  switch (family) {
    case Family::Farima: return 0.0;
    case Family::GegenbauerHalfPi: return 0.5 * std::numbers::pi;
    case Family::FlippedPi: return std::numbers::pi;
  }
  return 0.0;
}

inline ArrayXd model_autocorr(Family family, double alpha, Index maxlag)
{
  switch (family) {
    case Family::Farima:
      return autocorr_farima(alpha, maxlag);
    case Family::GegenbauerHalfPi:
      return autocorr_gegenbauer_halfpi(alpha, maxlag);
    case Family::FlippedPi:
      return spectral_flip(autocorr_farima(alpha, maxlag));
  }
  throw DomainError("unknown model family");
}

struct SimModel {
  Family family = Family::Farima;
  double alpha = 0.0;
  Index n = 0;
  std::uint64_t seed = 0;
};

//! Simulate one unit-variance Gaussian path of the model. Deterministic
//! given (family, alpha, n, seed).
inline Eigen::VectorXd simulate(const SimModel& model)
{
  if (model.n < 1)
    throw DomainError("simulate requires n >= 1");
  validate_memory_parameter(model.alpha);
  return davies_harte(model_autocorr(model.family, model.alpha, model.n), model.n,
                      model.seed);
}

}  // namespace polefinder
