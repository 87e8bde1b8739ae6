#pragma once

#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "polefinder/estimators.hpp"
#include "polefinder/rng.hpp"
#include "polefinder/simulate.hpp"
#include "polefinder/spectral.hpp"

namespace polefinder {

enum class McEstimator {
  PolePsi,        // q_hat - s, pole search on the smoothed profile
  PoleLog,        // q_tilde - s, log-periodogram pole search
  TwoStepAtHat,   // two-step memory estimate anchored at q_hat
  TwoStepAtTrue,  // two-step memory estimate anchored at the true index s
  LogAtTrue,      // log-periodogram memory estimate at s, band m
  LogAtTilde      // log-periodogram memory estimate at q_tilde, band m
};

struct MCConfig {
  std::vector<Family> families;
  std::vector<double> alphas;
  std::vector<Index> ns;
  int reps = 0;
  std::uint64_t base_seed = 0;
  std::vector<McEstimator> estimators;
  std::optional<Index> k, k1, m, m1;  // bandwidth overrides; defaults from n otherwise
};

struct MCRecord {
  Family family = Family::Farima;
  double lambda0 = 0.0;
  double alpha = 0.0;
  Index n = 0;
  McEstimator estimator = McEstimator::PolePsi;
  double bias = 0.0;
  double sd = 0.0;
  double mse = 0.0;
  int reps = 0;
  double wall_time_s = 0.0;
  EstimatorConfig bandwidths;
};

struct MCCellError {
  Family family = Family::Farima;
  double alpha = 0.0;
  Index n = 0;
  std::string message;
};

struct MCReport {
  std::vector<MCRecord> records;
  std::vector<MCCellError> errors;
  std::uint64_t base_seed = 0;
  int reps = 0;
};

namespace detail {

inline std::uint64_t family_tag(Family family)
{
  switch (family) {
    case Family::Farima: return 1;
    case Family::GegenbauerHalfPi: return 2;
    case Family::FlippedPi: return 3;
  }
  return 0;
}

//! Replication seed, a pure function of (base_seed, cell, replication):
//! cells re-run in isolation reproduce their draws exactly.
inline std::uint64_t replication_seed(std::uint64_t base_seed, Family family, double alpha,
                                      Index n, Index rep)
{
  std::uint64_t key = derive_key(base_seed, family_tag(family));
  key = derive_key(key, std::bit_cast<std::uint64_t>(alpha));
  key = derive_key(key, static_cast<std::uint64_t>(n));
  return derive_key(key, static_cast<std::uint64_t>(rep));
}

inline bool wants(const std::vector<McEstimator>& set, McEstimator which)
{
  for (const auto e : set)
    if (e == which)
      return true;
  return false;
}

}  // namespace detail

//! Closest Fourier index to a pole location (the truth that pole biases
//! are measured against, in index units).
inline Index closest_fourier_index(double lambda, Index n)
{
  const auto q = static_cast<Index>(
    std::floor(lambda * static_cast<double>(n) / (2.0 * std::numbers::pi) + 0.5));
  return std::clamp<Index>(q, 0, n / 2);
}

//! Run the replication study. All estimators within a replication share
//! the same simulated draw. Results are identical for any worker count:
//! randomness is keyed by (base_seed, cell, replication) and aggregation
//! is a sequential reduction in replication order.
inline MCReport run_mc(const MCConfig& cfg, unsigned workers = 1)
{
  if (cfg.reps < 1)
    throw DomainError("run_mc requires reps >= 1");
  if (cfg.estimators.empty())
    throw DomainError("run_mc requires at least one estimator");
  if (workers == 0)
    workers = 1;

  MCReport report;
  report.base_seed = cfg.base_seed;
  report.reps = cfg.reps;

  const bool need_qhat = detail::wants(cfg.estimators, McEstimator::PolePsi) ||
                         detail::wants(cfg.estimators, McEstimator::TwoStepAtHat);
  const bool need_qtilde = detail::wants(cfg.estimators, McEstimator::PoleLog) ||
                           detail::wants(cfg.estimators, McEstimator::LogAtTilde);
  const bool need_twostep = detail::wants(cfg.estimators, McEstimator::TwoStepAtHat) ||
                            detail::wants(cfg.estimators, McEstimator::TwoStepAtTrue);
  const bool need_logmem = detail::wants(cfg.estimators, McEstimator::LogAtTrue) ||
                           detail::wants(cfg.estimators, McEstimator::LogAtTilde);

  for (const Family family : cfg.families) {
    for (const double alpha : cfg.alphas) {
      for (const Index n : cfg.ns) {
        const auto t0 = std::chrono::steady_clock::now();

        EstimatorConfig bw = bandwidth_defaults(n);
        if (cfg.k) bw.k = *cfg.k;
        if (cfg.k1) bw.k1 = *cfg.k1;
        if (cfg.m) bw.m = *cfg.m;
        if (cfg.m1) bw.m1 = *cfg.m1;
        validate_config(bw, n);

        const double lambda0 = pole_location(family);
        const Index s_true = closest_fourier_index(lambda0, n);

        EmbeddingSpectrum emb;
        try {
          emb = circulant_embedding(model_autocorr(family, alpha, n), n);
        } catch (const NotEmbeddable& e) {
          report.errors.push_back({ family, alpha, n, e.what() });
          continue;
        }

        const BandWeights psi_band = make_band_weights(WeightSpec::builtin_psi(), bw.k);
        const BandWeights w_band = make_band_weights(WeightSpec::builtin_w(), bw.m);
        const LogBandWeights log_band_k = make_log_band_weights(bw.k);
        const LogBandWeights log_band_m = make_log_band_weights(bw.m);

        const int n_est = static_cast<int>(cfg.estimators.size());
        Eigen::MatrixXd estimates(cfg.reps, n_est);

        auto run_replication = [&](Index r) {
          const std::uint64_t seed =
            detail::replication_seed(cfg.base_seed, family, alpha, n, r);
          const Eigen::VectorXd x = davies_harte(emb, seed);
          const PeriodogramGrid grid = periodogram(x);
          const Index half = grid.half();

          Index q_hat = 0;
          if (need_qhat) {
            const SmoothedSpectrum fhat = averaged_periodogram(grid, bw.k1);
            const ArrayXd log_fhat = fhat.floored.log();
            ArrayXd profile(half + 1);
            for (Index q = 0; q <= half; ++q)
              profile[q] = detail::weighted_log_alpha(q, log_fhat, n, psi_band);
            q_hat = detail::argmax_smallest(profile);
          }

          Index q_tilde = 0;
          ArrayXd log_ords;
          if (need_qtilde || need_logmem)
            log_ords = detail::log_ordinates_with_remap(grid);
          if (need_qtilde) {
            ArrayXd profile(half + 1);
            for (Index q = 0; q <= half; ++q)
              profile[q] = detail::log_periodogram_alpha_impl(q, log_ords, n, log_band_k);
            q_tilde = detail::argmax_smallest(profile);
          }

          ArrayXd log_fhat_m1;
          if (need_twostep)
            log_fhat_m1 = averaged_periodogram(grid, bw.m1).floored.log();

          for (int e = 0; e < n_est; ++e) {
            double value = 0.0;
            switch (cfg.estimators[e]) {
              case McEstimator::PolePsi:
                value = static_cast<double>(q_hat - s_true);
                break;
              case McEstimator::PoleLog:
                value = static_cast<double>(q_tilde - s_true);
                break;
              case McEstimator::TwoStepAtHat:
                value = detail::weighted_log_alpha(q_hat, log_fhat_m1, n, w_band) - alpha;
                break;
              case McEstimator::TwoStepAtTrue:
                value = detail::weighted_log_alpha(s_true, log_fhat_m1, n, w_band) - alpha;
                break;
              case McEstimator::LogAtTrue:
                value =
                  detail::log_periodogram_alpha_impl(s_true, log_ords, n, log_band_m) - alpha;
                break;
              case McEstimator::LogAtTilde:
                value =
                  detail::log_periodogram_alpha_impl(q_tilde, log_ords, n, log_band_m) - alpha;
                break;
            }
            estimates(r, e) = value;
          }
        };

        if (workers <= 1) {
          for (Index r = 0; r < cfg.reps; ++r)
            run_replication(r);
        } else {
          std::atomic<Index> next{ 0 };
          std::vector<std::thread> pool;
          pool.reserve(workers);
          for (unsigned t = 0; t < workers; ++t) {
            pool.emplace_back([&] {
              for (;;) {
                const Index r = next.fetch_add(1);
                if (r >= cfg.reps)
                  return;
                run_replication(r);
              }
            });
          }
          for (auto& th : pool)
            th.join();
        }

        const double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        // Sequential reduction in replication order.
        for (int e = 0; e < n_est; ++e) {
          double mean = 0.0;
          for (Index r = 0; r < cfg.reps; ++r)
            mean += estimates(r, e);
          mean /= static_cast<double>(cfg.reps);

          double ss = 0.0;
          for (Index r = 0; r < cfg.reps; ++r) {
            const double d = estimates(r, e) - mean;
            ss += d * d;
          }
          const double sd =
            cfg.reps > 1 ? std::sqrt(ss / static_cast<double>(cfg.reps - 1)) : 0.0;

          MCRecord rec;
          rec.family = family;
          rec.lambda0 = lambda0;
          rec.alpha = alpha;
          rec.n = n;
          rec.estimator = cfg.estimators[e];
          rec.bias = mean;
          rec.sd = sd;
          rec.mse = mean * mean + ss / static_cast<double>(cfg.reps);
          rec.reps = cfg.reps;
          rec.wall_time_s = wall;
          rec.bandwidths = bw;
          report.records.push_back(rec);
        }
      }
    }
  }
  return report;
}

}  // namespace polefinder
