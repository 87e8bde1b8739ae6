#pragma once

#include <cctype>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "polefinder/errors.hpp"
#include "polefinder/estimators.hpp"
#include "polefinder/montecarlo.hpp"
#include "polefinder/simulate.hpp"
#include "polefinder/version.hpp"
#include "polefinder/weights.hpp"

namespace polefinder {

//! Machine format for floating-point output: 17 significant digits round-trips
//! a double exactly.
inline std::string format_g17(double x)
{
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::string family_name(Family family)
{
  switch (family) {
    case Family::Farima: return "farima";
    case Family::GegenbauerHalfPi: return "gegenbauer";
    case Family::FlippedPi: return "flipped-pi";
  }
  return "unknown";
}

inline Family family_from_name(const std::string& name)
{
  if (name == "farima") return Family::Farima;
  if (name == "gegenbauer") return Family::GegenbauerHalfPi;
  if (name == "flipped-pi") return Family::FlippedPi;
  throw DomainError("unknown model family '" + name + "'");
}

inline std::string estimator_name(McEstimator estimator)
{
  switch (estimator) {
    case McEstimator::PolePsi: return "pole-psi";
    case McEstimator::PoleLog: return "pole-log";
    case McEstimator::TwoStepAtHat: return "two-step-at-hat";
    case McEstimator::TwoStepAtTrue: return "two-step-at-true";
    case McEstimator::LogAtTrue: return "log-at-true";
    case McEstimator::LogAtTilde: return "log-at-tilde";
  }
  return "unknown";
}

inline McEstimator estimator_from_name(const std::string& name)
{
  if (name == "pole-psi") return McEstimator::PolePsi;
  if (name == "pole-log") return McEstimator::PoleLog;
  if (name == "two-step-at-hat") return McEstimator::TwoStepAtHat;
  if (name == "two-step-at-true") return McEstimator::TwoStepAtTrue;
  if (name == "log-at-true") return McEstimator::LogAtTrue;
  if (name == "log-at-tilde") return McEstimator::LogAtTilde;
  throw DomainError("unknown estimator '" + name + "'");
}

inline std::string regime_name(BoundaryRegime regime)
{
  switch (regime) {
    case BoundaryRegime::Interior: return "interior";
    case BoundaryRegime::AtZero: return "at-zero";
    case BoundaryRegime::AtPi: return "at-pi";
  }
  return "unknown";
}

namespace detail {

inline bool parse_double(const std::string& token, double& out)
{
  std::size_t pos = 0;
  try {
    out = std::stod(token, &pos);
  } catch (...) {
    return false;
  }
  while (pos < token.size() && std::isspace(static_cast<unsigned char>(token[pos])))
    ++pos;
  return pos == token.size();
}

inline std::vector<std::string> split_csv_line(const std::string& line)
{
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ','))
    fields.push_back(field);
  if (!line.empty() && line.back() == ',')
    fields.emplace_back();
  return fields;
}

inline std::string strip(const std::string& s)
{
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace detail

//! Read a series from CSV. The header line is optional and auto-detected
//! (a non-numeric first line is treated as a header). With no column name
//! the first column is used.
inline Eigen::VectorXd read_series_csv(const std::string& path,
                                       const std::optional<std::string>& column = std::nullopt)
{
  std::ifstream in(path);
  if (!in)
    throw DomainError("cannot open input file '" + path + "'");

  std::vector<double> values;
  std::string line;
  std::size_t col = 0;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (detail::strip(line).empty())
      continue;
    const auto fields = detail::split_csv_line(line);
    if (first) {
      first = false;
      double probe;
      const bool numeric = !fields.empty() && detail::parse_double(detail::strip(fields[0]), probe);
      if (!numeric) {
        // Header line; resolve the column selection.
        if (column) {
          bool found = false;
          for (std::size_t i = 0; i < fields.size(); ++i) {
            if (detail::strip(fields[i]) == *column) {
              col = i;
              found = true;
              break;
            }
          }
          if (!found)
            throw DomainError("column '" + *column + "' not found in '" + path + "'");
        }
        continue;
      }
      if (column)
        throw DomainError("--column given but '" + path + "' has no header line");
    }
    if (col >= fields.size())
      throw DomainError("row in '" + path + "' has too few columns");
    double v;
    if (!detail::parse_double(detail::strip(fields[col]), v))
      throw DomainError("non-numeric value '" + fields[col] + "' in '" + path + "'");
    values.push_back(v);
  }
  Eigen::VectorXd x(static_cast<Index>(values.size()));
  for (Index i = 0; i < x.size(); ++i)
    x[i] = values[static_cast<std::size_t>(i)];
  return x;
}

//! Write a series as CSV, one value per line under the header "x".
inline void write_series_csv(const std::string& path,
                             const Eigen::Ref<const Eigen::VectorXd>& x)
{
  std::ofstream out(path);
  if (!out)
    throw DomainError("cannot open output file '" + path + "'");
  out << "x\n";
  for (Index i = 0; i < x.size(); ++i)
    out << format_g17(x[i]) << "\n";
}

//! Write a profile as CSV with columns (q, lambda_q, alpha_hat).
inline void write_profile_csv(const std::string& path, const AlphaProfile& profile)
{
  std::ofstream out(path);
  if (!out)
    throw DomainError("cannot open output file '" + path + "'");
  out << "q,lambda_q,alpha_hat\n";
  for (Index q = 0; q < profile.values.size(); ++q)
    out << q << "," << format_g17(fourier_frequency(q, profile.n)) << ","
        << format_g17(profile.values[q]) << "\n";
}

//! Fixed-order Monte Carlo report CSV:
//! family,lambda0,alpha,n,estimator,bias,sd,mse,reps
inline void write_mc_csv(const std::string& path, const MCReport& report)
{
  std::ofstream out(path);
  if (!out)
    throw DomainError("cannot open output file '" + path + "'");
  out << "family,lambda0,alpha,n,estimator,bias,sd,mse,reps\n";
  for (const MCRecord& rec : report.records)
    out << family_name(rec.family) << "," << format_g17(rec.lambda0) << ","
        << format_g17(rec.alpha) << "," << rec.n << "," << estimator_name(rec.estimator)
        << "," << format_g17(rec.bias) << "," << format_g17(rec.sd) << ","
        << format_g17(rec.mse) << "," << rec.reps << "\n";
}

inline nlohmann::json mc_report_json(const MCReport& report)
{
  nlohmann::json records = nlohmann::json::array();
  for (const MCRecord& rec : report.records) {
    records.push_back({ { "family", family_name(rec.family) },
                        { "lambda0", rec.lambda0 },
                        { "alpha", rec.alpha },
                        { "n", rec.n },
                        { "estimator", estimator_name(rec.estimator) },
                        { "bias", rec.bias },
                        { "sd", rec.sd },
                        { "sd_degenerate", rec.reps < 2 },
                        { "mse", rec.mse },
                        { "reps", rec.reps },
                        { "wall_time_s", rec.wall_time_s },
                        { "bandwidths",
                          { { "k", rec.bandwidths.k },
                            { "k1", rec.bandwidths.k1 },
                            { "m", rec.bandwidths.m },
                            { "m1", rec.bandwidths.m1 } } } });
  }
  nlohmann::json errors = nlohmann::json::array();
  for (const MCCellError& err : report.errors)
    errors.push_back({ { "family", family_name(err.family) },
                       { "alpha", err.alpha },
                       { "n", err.n },
                       { "message", err.message } });
  return { { "schema_version", kSchemaVersion },
           { "provenance",
             { { "artifact_version", kVersion },
               { "base_seed", report.base_seed },
               { "reps", report.reps } } },
           { "records", records },
           { "errors", errors } };
}

inline MCConfig parse_mc_config(const nlohmann::json& j)
{
  MCConfig cfg;
  try {
    for (const auto& name : j.at("families"))
      cfg.families.push_back(family_from_name(name.get<std::string>()));
    for (const auto& a : j.at("alphas"))
      cfg.alphas.push_back(a.get<double>());
    for (const auto& n : j.at("ns"))
      cfg.ns.push_back(n.get<Index>());
    cfg.reps = j.at("reps").get<int>();
    cfg.base_seed = j.at("base_seed").get<std::uint64_t>();
    for (const auto& name : j.at("estimators"))
      cfg.estimators.push_back(estimator_from_name(name.get<std::string>()));
    if (j.contains("bandwidths")) {
      const auto& bw = j.at("bandwidths");
      if (bw.contains("k")) cfg.k = bw.at("k").get<Index>();
      if (bw.contains("k1")) cfg.k1 = bw.at("k1").get<Index>();
      if (bw.contains("m")) cfg.m = bw.at("m").get<Index>();
      if (bw.contains("m1")) cfg.m1 = bw.at("m1").get<Index>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed Monte Carlo config: ") + e.what());
  }
  return cfg;
}

//! Load a tabulated weight from a two-column CSV (u, value) with strictly
//! increasing u in (0, 1). An optional header line is auto-detected.
inline WeightSpec load_tabulated_weight_csv(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw DomainError("cannot open weight file '" + path + "'");
  std::vector<double> us, vs;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (detail::strip(line).empty())
      continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() < 2)
      throw InvalidWeight("weight CSV needs two columns (u, value)");
    double u, v;
    const bool ok = detail::parse_double(detail::strip(fields[0]), u) &&
                    detail::parse_double(detail::strip(fields[1]), v);
    if (!ok) {
      if (first) {
        first = false;
        continue;  // header
      }
      throw InvalidWeight("non-numeric row in weight CSV '" + path + "'");
    }
    first = false;
    us.push_back(u);
    vs.push_back(v);
  }
  ArrayXd u(static_cast<Index>(us.size()));
  ArrayXd v(static_cast<Index>(vs.size()));
  for (Index i = 0; i < u.size(); ++i) {
    u[i] = us[static_cast<std::size_t>(i)];
    v[i] = vs[static_cast<std::size_t>(i)];
  }
  return WeightSpec::tabulated(u, v);
}

}  // namespace polefinder
