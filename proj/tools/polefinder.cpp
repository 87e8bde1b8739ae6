// Command-line front end: simulation, estimation, profile export and the
// Monte Carlo replication engine.
//
// Exit codes: 0 success, 1 unexpected failure, 2 invalid flags or config,
// 3 model not embeddable, 4 series too short, 5 degenerate input.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "polefinder/inference.hpp"
#include "polefinder/io.hpp"
#include "polefinder/montecarlo.hpp"
#include "polefinder/simulate.hpp"
#include "polefinder/version.hpp"

namespace {

using nlohmann::json;
using namespace polefinder;

constexpr int kExitBadFlags = 2;
constexpr int kExitNotEmbeddable = 3;
constexpr int kExitSeriesTooShort = 4;
constexpr int kExitDegenerate = 5;

std::string utc_timestamp()
{
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json make_manifest(const std::string& command, json parameters)
{
  return { { "schema_version", kSchemaVersion },
           { "artifact_version", kVersion },
           { "command", command },
           { "timestamp_utc", utc_timestamp() },
           { "parameters", std::move(parameters) } };
}

void write_json_file(const std::string& path, const json& j)
{
  std::ofstream out(path);
  if (!out)
    throw DomainError("cannot open output file '" + path + "'");
  out << j.dump(2) << "\n";
}

struct SimulateArgs {
  std::string model;
  double alpha = 0.0;
  long n = 0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_simulate(const SimulateArgs& args)
{
  if (!(args.alpha > 0.0) || !(args.alpha < 1.0)) {
    std::cerr << "error: --alpha must lie in the open interval (0, 1), got " << args.alpha
              << "\n";
    return kExitBadFlags;
  }
  if (args.n < 1) {
    std::cerr << "error: --n must be positive\n";
    return kExitBadFlags;
  }

  SimModel model;
  model.family = family_from_name(args.model);
  model.alpha = args.alpha;
  model.n = args.n;
  model.seed = args.seed;

  const Eigen::VectorXd x = simulate(model);
  write_series_csv(args.out, x);
  write_json_file(args.out + ".manifest.json",
                  make_manifest("simulate", { { "model", args.model },
                                              { "alpha", args.alpha },
                                              { "n", args.n },
                                              { "seed", args.seed },
                                              { "out", args.out } }));
  return 0;
}

struct EstimateArgs {
  std::string input;
  std::optional<std::string> column;
  std::optional<long> k, k1, m, m1;
  bool auto_bandwidth = false;
  double level = 0.95;
  std::string format = "json";
  std::optional<double> known_pole;
  bool with_log_periodogram = false;
  std::optional<std::string> out;
};

EstimatorConfig resolve_bandwidths(const EstimateArgs& args, Index n)
{
  EstimatorConfig cfg;
  const bool all_given = args.k && args.k1 && args.m && args.m1;
  if (!all_given)
    cfg = bandwidth_defaults(n);  // throws SeriesTooShort below 64
  if (args.k) cfg.k = *args.k;
  if (args.k1) cfg.k1 = *args.k1;
  if (args.m) cfg.m = *args.m;
  if (args.m1) cfg.m1 = *args.m1;
  validate_config(cfg, n);
  return cfg;
}

int cmd_estimate(const EstimateArgs& args)
{
  const Eigen::VectorXd x = read_series_csv(args.input, args.column);
  validate_series(x, 8);
  const Index n = x.size();
  const EstimatorConfig cfg = resolve_bandwidths(args, n);

  const PeriodogramGrid grid = periodogram(x);
  if ((grid.ordinates > 0.0).count() == 0)
    throw DegenerateBand("degenerate input: periodogram is identically zero");

  json warnings = json::array();
  PoleEstimate pole;
  bool searched = false;
  if (args.known_pole) {
    const Index anchor = closest_fourier_index(*args.known_pole, n);
    pole.q_hat = anchor;
    pole.lambda_hat = fourier_frequency(anchor, n);
    pole.regime = regime_of(anchor, n);
  } else {
    pole = pole_search(averaged_periodogram(grid, cfg.k1), cfg.k);
    searched = true;
  }

  const MemoryEstimate memory = two_step_alpha(pole.q_hat, grid, cfg.m, cfg.m1);
  if (!memory.in_model_range())
    warnings.push_back("two-step memory estimate outside (0, 1); reported unclipped");

  const AlphaCI a_ci = alpha_ci(memory, cfg.m, WeightSpec::builtin_w().constants(), args.level);

  json pole_ci_json = nullptr;
  try {
    const PoleCI p_ci = pole_ci(pole, memory.alpha, n, cfg.k,
                                WeightSpec::builtin_psi().constants(), args.level);
    pole_ci_json = { { "center", p_ci.center },
                     { "half_width", p_ci.half_width },
                     { "lo", p_ci.lo },
                     { "hi", p_ci.hi },
                     { "level", p_ci.level },
                     { "regime", regime_name(p_ci.regime) },
                     { "point_mass_at_boundary", p_ci.point_mass_at_boundary },
                     { "psi_variance", p_ci.psi_variance } };
  } catch (const AlphaNonPositive&) {
    warnings.push_back("pole CI unavailable: plug-in memory estimate is nonpositive");
  }

  json result = { { "schema_version", kSchemaVersion },
                  { "n", n },
                  { "q_hat", pole.q_hat },
                  { "lambda_hat", pole.lambda_hat },
                  { "regime", regime_name(pole.regime) },
                  { "pole_searched", searched },
                  { "alpha_two_step", memory.alpha },
                  { "alpha_in_model_range", memory.in_model_range() },
                  { "anchor_q", memory.anchor_q },
                  { "pole_ci", pole_ci_json },
                  { "alpha_ci",
                    { { "center", a_ci.center },
                      { "half_width", a_ci.half_width },
                      { "lo", a_ci.lo },
                      { "hi", a_ci.hi },
                      { "level", a_ci.level },
                      { "variance", a_ci.variance },
                      { "bias_correction", a_ci.bias_correction } } },
                  { "bandwidths",
                    { { "k", cfg.k }, { "k1", cfg.k1 }, { "m", cfg.m }, { "m1", cfg.m1 } } },
                  { "warnings", warnings } };

  if (args.with_log_periodogram) {
    const PoleEstimate tilde = log_periodogram_pole(grid, cfg.k);
    const MemoryEstimate log_mem = log_periodogram_alpha(tilde.q_hat, grid, cfg.m);
    result["log_periodogram"] = { { "q_tilde", tilde.q_hat },
                                  { "lambda_tilde", tilde.lambda_hat },
                                  { "regime", regime_name(tilde.regime) },
                                  { "alpha_log", log_mem.alpha },
                                  { "band", log_mem.band } };
  }

  const json manifest = make_manifest(
    "estimate", { { "input", args.input },
                  { "column", args.column ? json(*args.column) : json(nullptr) },
                  { "k", cfg.k },
                  { "k1", cfg.k1 },
                  { "m", cfg.m },
                  { "m1", cfg.m1 },
                  { "level", args.level },
                  { "known_pole", args.known_pole ? json(*args.known_pole) : json(nullptr) },
                  { "with_log_periodogram", args.with_log_periodogram },
                  { "format", args.format } });

  std::string payload;
  if (args.format == "json") {
    result["manifest"] = manifest;
    payload = result.dump(2) + "\n";
  } else {
    payload = "n,q_hat,lambda_hat,regime,alpha_two_step,pole_ci_lo,pole_ci_hi,"
              "alpha_ci_lo,alpha_ci_hi,k,k1,m,m1\n";
    const std::string pole_lo =
      pole_ci_json.is_null() ? "" : format_g17(pole_ci_json["lo"].get<double>());
    const std::string pole_hi =
      pole_ci_json.is_null() ? "" : format_g17(pole_ci_json["hi"].get<double>());
    payload += std::to_string(n) + "," + std::to_string(pole.q_hat) + "," +
               format_g17(pole.lambda_hat) + "," + regime_name(pole.regime) + "," +
               format_g17(memory.alpha) + "," + pole_lo + "," + pole_hi + "," +
               format_g17(a_ci.lo) + "," + format_g17(a_ci.hi) + "," +
               std::to_string(cfg.k) + "," + std::to_string(cfg.k1) + "," +
               std::to_string(cfg.m) + "," + std::to_string(cfg.m1) + "\n";
  }

  if (args.out) {
    std::ofstream out(*args.out);
    if (!out)
      throw DomainError("cannot open output file '" + *args.out + "'");
    out << payload;
    write_json_file(*args.out + ".manifest.json", manifest);
  } else {
    std::cout << payload;
  }
  return 0;
}

struct ProfileArgs {
  std::string input;
  std::optional<std::string> column;
  std::string out;
  std::optional<long> k, k1, m, m1;
  bool auto_bandwidth = false;
};

int cmd_profile(const ProfileArgs& args)
{
  const Eigen::VectorXd x = read_series_csv(args.input, args.column);
  validate_series(x, 8);
  EstimateArgs bw;
  bw.k = args.k;
  bw.k1 = args.k1;
  bw.m = args.m;
  bw.m1 = args.m1;
  const EstimatorConfig cfg = resolve_bandwidths(bw, x.size());

  const PeriodogramGrid grid = periodogram(x);
  if ((grid.ordinates > 0.0).count() == 0)
    throw DegenerateBand("degenerate input: periodogram is identically zero");

  const AlphaProfile profile = alpha_profile(averaged_periodogram(grid, cfg.k1), cfg.k);
  write_profile_csv(args.out, profile);
  write_json_file(args.out + ".manifest.json",
                  make_manifest("profile", { { "input", args.input },
                                             { "out", args.out },
                                             { "k", cfg.k },
                                             { "k1", cfg.k1 } }));
  return 0;
}

struct MonteCarloArgs {
  std::string config;
  std::string out_dir;
  std::optional<unsigned> workers;
};

unsigned default_workers()
{
  if (const char* env = std::getenv("POLEFINDER_WORKERS")) {
    const long w = std::strtol(env, nullptr, 10);
    if (w >= 1)
      return static_cast<unsigned>(w);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

int cmd_montecarlo(const MonteCarloArgs& args)
{
  json config_json;
  {
    std::ifstream in(args.config);
    if (!in) {
      std::cerr << "error: cannot open config '" << args.config << "'\n";
      return kExitBadFlags;
    }
    try {
      in >> config_json;
    } catch (const json::exception& e) {
      std::cerr << "error: malformed config: " << e.what() << "\n";
      return kExitBadFlags;
    }
  }

  MCConfig cfg;
  try {
    cfg = parse_mc_config(config_json);
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadFlags;
  }

  const unsigned workers = args.workers ? *args.workers : default_workers();
  const MCReport report = run_mc(cfg, workers);

  namespace fs = std::filesystem;
  fs::create_directories(args.out_dir);
  const std::string base = (fs::path(args.out_dir) / "report").string();
  write_mc_csv(base + ".csv", report);
  write_json_file(base + ".json", mc_report_json(report));
  write_json_file((fs::path(args.out_dir) / "manifest.json").string(),
                  make_manifest("montecarlo", { { "config", config_json },
                                                { "config_path", args.config },
                                                { "out", args.out_dir },
                                                { "workers", workers } }));
  if (!report.errors.empty()) {
    for (const auto& err : report.errors)
      std::cerr << "cell failed: " << family_name(err.family) << " alpha=" << err.alpha
                << " n=" << err.n << ": " << err.message << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{ "Spectral pole location and long-memory estimation" };
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate a Gaussian long-memory series");
  sim_cmd->add_option("--model", sim.model, "farima | gegenbauer | flipped-pi")->required();
  sim_cmd->add_option("--alpha", sim.alpha, "memory parameter in (0, 1)")->required();
  sim_cmd->add_option("--n", sim.n, "series length")->required();
  sim_cmd->add_option("--seed", sim.seed, "RNG seed")->default_val(0);
  sim_cmd->add_option("--out", sim.out, "output CSV path")->required();

  EstimateArgs est;
  auto* est_cmd = app.add_subcommand("estimate", "Estimate pole location and memory parameter");
  est_cmd->add_option("--input", est.input, "input CSV series")->required();
  est_cmd->add_option("--column", est.column, "column name when the CSV has a header");
  est_cmd->add_option("--k", est.k, "pole-search band count");
  est_cmd->add_option("--k1", est.k1, "first-stage smoothing span");
  est_cmd->add_option("--m", est.m, "two-step band count");
  est_cmd->add_option("--m1", est.m1, "two-step smoothing span");
  est_cmd->add_flag("--auto-bandwidth", est.auto_bandwidth,
                    "use defaults derived from n (default when no bandwidths given)");
  est_cmd->add_option("--level", est.level, "confidence level")->default_val(0.95);
  est_cmd->add_option("--format", est.format, "json | csv")
    ->check(CLI::IsMember({ "json", "csv" }))
    ->default_val("json");
  est_cmd->add_option("--known-pole", est.known_pole,
                      "skip the search; anchor at the closest Fourier frequency");
  est_cmd->add_flag("--with-log-periodogram", est.with_log_periodogram,
                    "also report the log-periodogram comparator");
  est_cmd->add_option("--out", est.out, "write the result here instead of stdout");

  ProfileArgs prof;
  auto* prof_cmd = app.add_subcommand("profile", "Export the alpha profile for plotting");
  prof_cmd->add_option("--input", prof.input, "input CSV series")->required();
  prof_cmd->add_option("--column", prof.column, "column name when the CSV has a header");
  prof_cmd->add_option("--out", prof.out, "output CSV path")->required();
  prof_cmd->add_option("--k", prof.k, "pole-search band count");
  prof_cmd->add_option("--k1", prof.k1, "first-stage smoothing span");
  prof_cmd->add_flag("--auto-bandwidth", prof.auto_bandwidth,
                     "use defaults derived from n (default when no bandwidths given)");

  MonteCarloArgs mc;
  auto* mc_cmd = app.add_subcommand("montecarlo", "Run a Monte Carlo replication study");
  mc_cmd->add_option("--config", mc.config, "JSON config path")->required();
  mc_cmd->add_option("--out", mc.out_dir, "output directory")->required();
  mc_cmd->add_option("--workers", mc.workers,
                     "worker threads (default: POLEFINDER_WORKERS or hardware)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadFlags;
  }

  try {
    if (sim_cmd->parsed())
      return cmd_simulate(sim);
    if (est_cmd->parsed())
      return cmd_estimate(est);
    if (prof_cmd->parsed())
      return cmd_profile(prof);
    if (mc_cmd->parsed())
      return cmd_montecarlo(mc);
  } catch (const NotEmbeddable& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNotEmbeddable;
  } catch (const SeriesTooShort& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSeriesTooShort;
  } catch (const DegenerateBand& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const BandwidthTooLarge& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadFlags;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadFlags;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
