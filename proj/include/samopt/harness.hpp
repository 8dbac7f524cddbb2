#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "samopt/optimizer.hpp"
#include "samopt/problems.hpp"

namespace samopt {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { eig_study, variant_compare, benchmark, single_run };
enum class ProblemKind { quadratic, rosenbrock };
enum class OutputFormat { csv, json };

struct ProblemSpec {
  ProblemKind kind = ProblemKind::quadratic;
  int p = 8;        // quadratic: n = 2^p
  int n = 256;      // rosenbrock dimension
  double q = 2.0;   // quadratic spectrum exponent
};

/// Fully resolved experiment description.  Defaults follow the studies this
/// library reproduces; a JSON config file overlays them and CLI flags win
/// over both.  Unknown keys in the file are errors.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::single_run;
  ProblemSpec problem;
  NoiseModel noise;
  std::vector<double> q_values = {0.5, 1.0, 2.0};
  std::vector<double> noise_levels = {0.005, 0.025, 0.05};
  std::vector<double> bias_levels = {0.0, 0.1};
  SamConfig sam;
  double sam_delta0_rel_x0 = 10.0;  // used when sam.delta0 <= 0
  BfgsConfig bfgs;
  NelderMeadConfig nelder_mead;
  std::string method = "sam";  // single_run: sam | sam_directional | bfgs | nelder_mead
  int runs = 1;
  std::uint64_t seed = 20240817;
  int eig_count = 8;  // eigenvalue errors reported by the eig study
  std::string out;    // output path; empty writes to stdout
  OutputFormat format = OutputFormat::csv;
  bool quiet = false;
};

ExperimentConfig default_config(ExperimentKind kind);

/// Parses a JSON config file on top of the given defaults; throws ConfigError
/// on unknown keys, malformed values, or unreadable files.
ExperimentConfig load_config_file(const std::string& path,
                                  const ExperimentConfig& defaults);
ExperimentConfig load_config_text(const std::string& text,
                                  const ExperimentConfig& defaults);

void validate_config(const ExperimentConfig& config);

/// Canonical JSON serialization of a resolved config; hashing it gives the
/// provenance tag carried by every output row.
std::string config_to_json_text(const ExperimentConfig& config);
std::string config_hash_hex(const ExperimentConfig& config);

struct SummaryStatistics {
  double median = 0.0;
  double quantile_025 = 0.0;
  double quantile_975 = 0.0;
  int count = 0;
};

/// Median and the 0.025/0.975 empirical quantiles, via linear interpolation
/// of order statistics.  Rejects empty or non-finite input.
SummaryStatistics summarize(std::vector<double> values);

/// 95% bootstrap confidence interval for the median.
std::pair<double, double> bootstrap_median_ci(const std::vector<double>& values,
                                              int n_boot, std::uint64_t seed);

/// Deterministic per-(run, stream) seed derivation from the master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t run,
                          std::uint64_t stream);

/// One measured value.  Cell coordinates that do not apply stay NaN (q,
/// noise, bias) or empty; run < 0 marks deterministic reference rows.
struct Observation {
  int run = -1;
  double q = 0.0;
  double noise = 0.0;
  double bias = 0.0;
  std::string method;
  std::string quantity;
  double index = 0.0;
  double value = 0.0;
};

struct SummaryRow {
  double q = 0.0;
  double noise = 0.0;
  double bias = 0.0;
  std::string method;
  std::string quantity;
  double index = 0.0;
  SummaryStatistics stats;
};

struct ResultTable {
  std::string config_json;  // resolved config, canonical serialization
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<Observation> obs;
  std::vector<SummaryRow> summary;
};

ResultTable run_eig_study(const ExperimentConfig& config);
ResultTable run_variant_compare(const ExperimentConfig& config);
ResultTable run_benchmark(const ExperimentConfig& config);
ResultTable run_single(const ExperimentConfig& config);
ResultTable run_experiment(const ExperimentConfig& config);

void write_csv(const ResultTable& table, std::ostream& os);
void write_json(const ResultTable& table, std::ostream& os);

/// Writes to config.out in config.format; an empty path goes to stdout.
void write_result(const ResultTable& table, const ExperimentConfig& config);

/// Initial point for a problem spec: sin(i) for the quadratic studies,
/// alternating (-1, 0) for the Rosenbrock benchmark.
Vector default_initial_point(const ProblemSpec& problem);

}  // namespace samopt
