#include "samopt/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "samopt/model.hpp"
#include "samopt/sampling.hpp"

namespace samopt {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::eig_study: return "eig_study";
    case ExperimentKind::variant_compare: return "variant_compare";
    case ExperimentKind::benchmark: return "benchmark";
    case ExperimentKind::single_run: return "single_run";
  }
  return "unknown";
}

std::string problem_name(ProblemKind kind) {
  return kind == ProblemKind::quadratic ? "quadratic" : "rosenbrock";
}

std::string noise_name(NoiseKind kind) {
  return kind == NoiseKind::none ? "none" : "gaussian";
}

std::string variant_name(ModelVariant variant) {
  return variant == ModelVariant::step_average ? "step_average" : "directional";
}

std::string format_name(OutputFormat format) {
  return format == OutputFormat::csv ? "csv" : "json";
}

template <typename T>
T parse_enum(const std::string& value, const char* what,
             std::initializer_list<std::pair<const char*, T>> table) {
  for (const auto& [name, v] : table)
    if (value == name) return v;
  throw ConfigError(std::string("invalid ") + what + " '" + value + "'");
}

void check_keys(const json& j, const std::string& ctx,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) { known = true; break; }
    if (!known)
      throw ConfigError("unknown key '" + item.key() + "' in " + ctx);
  }
}

double get_number(const json& v, const std::string& ctx) {
  if (!v.is_number()) throw ConfigError(ctx + " must be a number");
  return v.get<double>();
}

int get_int(const json& v, const std::string& ctx) {
  if (!v.is_number_integer()) throw ConfigError(ctx + " must be an integer");
  return v.get<int>();
}

long long get_int64(const json& v, const std::string& ctx) {
  if (!v.is_number_integer()) throw ConfigError(ctx + " must be an integer");
  return v.get<long long>();
}

std::uint64_t get_u64(const json& v, const std::string& ctx) {
  if (!v.is_number_unsigned() && !v.is_number_integer())
    throw ConfigError(ctx + " must be a non-negative integer");
  return v.get<std::uint64_t>();
}

bool get_bool(const json& v, const std::string& ctx) {
  if (!v.is_boolean()) throw ConfigError(ctx + " must be a boolean");
  return v.get<bool>();
}

std::string get_string(const json& v, const std::string& ctx) {
  if (!v.is_string()) throw ConfigError(ctx + " must be a string");
  return v.get<std::string>();
}

std::vector<double> get_number_list(const json& v, const std::string& ctx) {
  if (!v.is_array()) throw ConfigError(ctx + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(get_number(e, ctx + " entry"));
  return out;
}

void merge_problem(const json& j, ProblemSpec& spec) {
  check_keys(j, "problem", {"kind", "p", "n", "q"});
  if (j.contains("kind"))
    spec.kind = parse_enum<ProblemKind>(
        get_string(j["kind"], "problem.kind"), "problem.kind",
        {{"quadratic", ProblemKind::quadratic},
         {"rosenbrock", ProblemKind::rosenbrock}});
  if (j.contains("p")) spec.p = get_int(j["p"], "problem.p");
  if (j.contains("n")) spec.n = get_int(j["n"], "problem.n");
  if (j.contains("q")) spec.q = get_number(j["q"], "problem.q");
}

void merge_noise(const json& j, NoiseModel& noise) {
  check_keys(j, "noise", {"kind", "rel_sigma_f", "rel_sigma_g", "rel_bias_g"});
  if (j.contains("kind"))
    noise.kind = parse_enum<NoiseKind>(
        get_string(j["kind"], "noise.kind"), "noise.kind",
        {{"none", NoiseKind::none}, {"gaussian", NoiseKind::gaussian}});
  if (j.contains("rel_sigma_f"))
    noise.rel_sigma_f = get_number(j["rel_sigma_f"], "noise.rel_sigma_f");
  if (j.contains("rel_sigma_g"))
    noise.rel_sigma_g = get_number(j["rel_sigma_g"], "noise.rel_sigma_g");
  if (j.contains("rel_bias_g"))
    noise.rel_bias_g = get_number(j["rel_bias_g"], "noise.rel_bias_g");
}

void merge_sam(const json& j, ExperimentConfig& c) {
  check_keys(j, "sam",
             {"r", "m", "alpha", "delta0", "delta0_rel_x0", "delta_max", "tau",
              "max_iter", "variant"});
  if (j.contains("r")) c.sam.r = get_int(j["r"], "sam.r");
  if (j.contains("m")) c.sam.m = get_int(j["m"], "sam.m");
  if (j.contains("alpha")) c.sam.alpha = get_number(j["alpha"], "sam.alpha");
  if (j.contains("delta0")) c.sam.delta0 = get_number(j["delta0"], "sam.delta0");
  if (j.contains("delta0_rel_x0"))
    c.sam_delta0_rel_x0 = get_number(j["delta0_rel_x0"], "sam.delta0_rel_x0");
  if (j.contains("delta_max"))
    c.sam.delta_max = get_number(j["delta_max"], "sam.delta_max");
  if (j.contains("tau")) c.sam.tau = get_number(j["tau"], "sam.tau");
  if (j.contains("max_iter"))
    c.sam.max_iter = get_int(j["max_iter"], "sam.max_iter");
  if (j.contains("variant"))
    c.sam.variant = parse_enum<ModelVariant>(
        get_string(j["variant"], "sam.variant"), "sam.variant",
        {{"step_average", ModelVariant::step_average},
         {"directional", ModelVariant::directional}});
}

void merge_bfgs(const json& j, BfgsConfig& c) {
  check_keys(j, "bfgs",
             {"max_evals", "grad_tol", "c1", "c2", "max_line_search_evals"});
  if (j.contains("max_evals"))
    c.max_evals = get_int64(j["max_evals"], "bfgs.max_evals");
  if (j.contains("grad_tol"))
    c.grad_tol = get_number(j["grad_tol"], "bfgs.grad_tol");
  if (j.contains("c1")) c.c1 = get_number(j["c1"], "bfgs.c1");
  if (j.contains("c2")) c.c2 = get_number(j["c2"], "bfgs.c2");
  if (j.contains("max_line_search_evals"))
    c.max_line_search_evals =
        get_int(j["max_line_search_evals"], "bfgs.max_line_search_evals");
}

void merge_nelder_mead(const json& j, NelderMeadConfig& c) {
  check_keys(j, "nelder_mead", {"max_evals", "simplex_scale", "size_tol"});
  if (j.contains("max_evals"))
    c.max_evals = get_int64(j["max_evals"], "nelder_mead.max_evals");
  if (j.contains("simplex_scale"))
    c.simplex_scale = get_number(j["simplex_scale"], "nelder_mead.simplex_scale");
  if (j.contains("size_tol"))
    c.size_tol = get_number(j["size_tol"], "nelder_mead.size_tol");
}

ResultTable init_table(const ExperimentConfig& config) {
  ResultTable table;
  table.config_json = config_to_json_text(config);
  table.config_hash = config_hash_hex(config);
  table.seed = config.seed;
  return table;
}

double resolve_delta0(const ExperimentConfig& config, const Vector& x0) {
  if (config.sam.delta0 > 0.0) return config.sam.delta0;
  return config.sam_delta0_rel_x0 * norm(x0);
}

std::shared_ptr<ObjectiveOracle> make_clean_oracle(const ProblemSpec& spec,
                                                   double q) {
  if (spec.kind == ProblemKind::quadratic)
    return std::make_shared<SyntheticQuadratic>(spec.p, q);
  return std::make_shared<ModifiedRosenbrock>(spec.n);
}

void log_line(const ExperimentConfig& config, const std::string& msg) {
  if (!config.quiet) std::cerr << msg << "\n";
}

void append_summary(ResultTable& table, double q, double noise, double bias,
                    const std::string& method, const std::string& quantity,
                    double index, std::vector<double> values) {
  SummaryRow row;
  row.q = q;
  row.noise = noise;
  row.bias = bias;
  row.method = method;
  row.quantity = quantity;
  row.index = index;
  row.stats = summarize(std::move(values));
  table.summary.push_back(std::move(row));
}

// Numbers as the CSV writer emits them: measured values in full-precision
// scientific notation, cell coordinates in shortest round-trip form.
std::string sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17e", v);
  return buf;
}

std::string compact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string opt_compact(double v) { return std::isnan(v) ? "" : compact(v); }
std::string opt_sci(double v) { return std::isnan(v) ? "" : sci(v); }

json obs_to_json(const Observation& o) {
  json row;
  if (o.run >= 0) row["run"] = o.run;
  if (!std::isnan(o.q)) row["q"] = o.q;
  if (!std::isnan(o.noise)) row["noise"] = o.noise;
  if (!std::isnan(o.bias)) row["bias"] = o.bias;
  row["method"] = o.method;
  row["quantity"] = o.quantity;
  row["index"] = o.index;
  row["value"] = o.value;
  return row;
}

}  // namespace

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.experiment = kind;
  switch (kind) {
    case ExperimentKind::eig_study:
      c.problem.kind = ProblemKind::quadratic;
      c.problem.p = 8;
      c.noise = {NoiseKind::gaussian, 0.0, 0.025, 0.0, 0};
      c.runs = 100;
      c.sam.m = 16;
      c.sam.r = 8;
      c.sam.alpha = 1.0;
      c.sam.delta0 = 0.0;
      break;
    case ExperimentKind::variant_compare:
      c.problem.kind = ProblemKind::quadratic;
      c.problem.p = 8;
      c.noise = {NoiseKind::gaussian, 0.025, 0.025, 0.0, 0};
      c.runs = 1000;
      c.sam.m = 16;
      c.sam.r = 4;
      c.sam.alpha = 1.0;
      c.sam.delta0 = 0.0;
      break;
    case ExperimentKind::benchmark:
      c.problem.kind = ProblemKind::rosenbrock;
      c.problem.n = 256;
      c.noise = {NoiseKind::gaussian, 0.025, 0.025, 0.0, 0};
      c.runs = 20;
      c.sam.r = 4;
      c.sam.m = 16;
      c.sam.alpha = 0.5;
      c.sam.delta0 = 0.0;  // resolved as 10*||x0||
      c.sam.tau = 0.1;
      c.sam.max_iter = 10;
      c.bfgs.max_evals = 0;         // matched to the SAM evaluation count
      c.nelder_mead.max_evals = 0;  // matched to the SAM evaluation count
      break;
    case ExperimentKind::single_run:
      // small noise-free quadratic solved with a full-rank model
      c.problem.kind = ProblemKind::quadratic;
      c.problem.p = 4;
      c.problem.q = 1.0;
      c.noise.kind = NoiseKind::none;
      c.runs = 1;
      c.sam.r = 16;
      c.sam.m = 16;
      c.sam.alpha = 1e-3;
      c.sam.delta0 = 0.0;
      c.sam.tau = 1e-3;
      c.sam.max_iter = 50;
      c.bfgs.max_evals = 1000;
      c.nelder_mead.max_evals = 2000;
      break;
  }
  return c;
}

ExperimentConfig load_config_text(const std::string& text,
                                  const ExperimentConfig& defaults) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be an object");

  ExperimentConfig c = defaults;
  check_keys(j, "config",
             {"experiment", "problem", "noise", "q_values", "noise_levels",
              "bias_levels", "sam", "bfgs", "nelder_mead", "method", "runs",
              "seed", "eig_count", "out", "format", "quiet"});
  if (j.contains("experiment"))
    c.experiment = parse_enum<ExperimentKind>(
        get_string(j["experiment"], "experiment"), "experiment",
        {{"eig_study", ExperimentKind::eig_study},
         {"variant_compare", ExperimentKind::variant_compare},
         {"benchmark", ExperimentKind::benchmark},
         {"single_run", ExperimentKind::single_run}});
  if (j.contains("problem")) merge_problem(j["problem"], c.problem);
  if (j.contains("noise")) merge_noise(j["noise"], c.noise);
  if (j.contains("q_values"))
    c.q_values = get_number_list(j["q_values"], "q_values");
  if (j.contains("noise_levels"))
    c.noise_levels = get_number_list(j["noise_levels"], "noise_levels");
  if (j.contains("bias_levels"))
    c.bias_levels = get_number_list(j["bias_levels"], "bias_levels");
  if (j.contains("sam")) merge_sam(j["sam"], c);
  if (j.contains("bfgs")) merge_bfgs(j["bfgs"], c.bfgs);
  if (j.contains("nelder_mead")) merge_nelder_mead(j["nelder_mead"], c.nelder_mead);
  if (j.contains("method")) c.method = get_string(j["method"], "method");
  if (j.contains("runs")) c.runs = get_int(j["runs"], "runs");
  if (j.contains("seed")) c.seed = get_u64(j["seed"], "seed");
  if (j.contains("eig_count")) c.eig_count = get_int(j["eig_count"], "eig_count");
  if (j.contains("out")) c.out = get_string(j["out"], "out");
  if (j.contains("format"))
    c.format = parse_enum<OutputFormat>(
        get_string(j["format"], "format"), "format",
        {{"csv", OutputFormat::csv}, {"json", OutputFormat::json}});
  if (j.contains("quiet")) c.quiet = get_bool(j["quiet"], "quiet");
  return c;
}

ExperimentConfig load_config_file(const std::string& path,
                                  const ExperimentConfig& defaults) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_config_text(buffer.str(), defaults);
}

void validate_config(const ExperimentConfig& c) {
  if (c.runs < 1) throw ConfigError("runs must be >= 1");
  if (c.eig_count < 1) throw ConfigError("eig_count must be >= 1");
  if (c.sam.r < 1 || c.sam.m < c.sam.r)
    throw ConfigError("sam requires 1 <= r <= m");
  if (!(c.sam.alpha > 0.0)) throw ConfigError("sam.alpha must be > 0");
  if (!(c.sam.tau > 0.0)) throw ConfigError("sam.tau must be > 0");
  if (c.sam.max_iter < 1) throw ConfigError("sam.max_iter must be >= 1");
  if (!(c.sam.delta0 > 0.0) && !(c.sam_delta0_rel_x0 > 0.0))
    throw ConfigError("one of sam.delta0 or sam.delta0_rel_x0 must be > 0");
  if (c.noise.rel_sigma_f < 0.0 || c.noise.rel_sigma_g < 0.0 ||
      c.noise.rel_bias_g < 0.0)
    throw ConfigError("noise magnitudes must be >= 0");
  for (double v : c.noise_levels)
    if (v < 0.0) throw ConfigError("noise_levels entries must be >= 0");
  for (double v : c.bias_levels)
    if (v < 0.0) throw ConfigError("bias_levels entries must be >= 0");
  if (c.q_values.empty()) throw ConfigError("q_values must be nonempty");

  if (c.problem.kind == ProblemKind::quadratic) {
    if (c.problem.p < 0 || c.problem.p > 20)
      throw ConfigError("problem.p must be in [0, 20]");
  } else {
    if (c.problem.n < 2 || c.problem.n % 2 != 0)
      throw ConfigError("problem.n must be even and >= 2");
  }

  if (c.experiment == ExperimentKind::eig_study ||
      c.experiment == ExperimentKind::variant_compare) {
    if (c.problem.kind != ProblemKind::quadratic)
      throw ConfigError(experiment_name(c.experiment) +
                        " requires the quadratic problem");
  }
  if (c.experiment == ExperimentKind::benchmark &&
      c.problem.kind != ProblemKind::rosenbrock)
    throw ConfigError("benchmark requires the rosenbrock problem");

  if (!(c.bfgs.c1 > 0.0 && c.bfgs.c1 < c.bfgs.c2 && c.bfgs.c2 < 1.0))
    throw ConfigError("bfgs requires 0 < c1 < c2 < 1");
  if (!(c.nelder_mead.simplex_scale > 0.0))
    throw ConfigError("nelder_mead.simplex_scale must be > 0");

  if (c.experiment == ExperimentKind::single_run) {
    if (c.method != "sam" && c.method != "sam_step_average" &&
        c.method != "sam_directional" && c.method != "bfgs" &&
        c.method != "nelder_mead")
      throw ConfigError("unknown method '" + c.method + "'");
    if ((c.method == "bfgs" && c.bfgs.max_evals < 1) ||
        (c.method == "nelder_mead" && c.nelder_mead.max_evals < 1))
      throw ConfigError("single_run baselines need an explicit max_evals");
  }
}

std::string config_to_json_text(const ExperimentConfig& c) {
  json j;
  j["experiment"] = experiment_name(c.experiment);
  j["problem"] = {{"kind", problem_name(c.problem.kind)},
                  {"p", c.problem.p},
                  {"n", c.problem.n},
                  {"q", c.problem.q}};
  j["noise"] = {{"kind", noise_name(c.noise.kind)},
                {"rel_sigma_f", c.noise.rel_sigma_f},
                {"rel_sigma_g", c.noise.rel_sigma_g},
                {"rel_bias_g", c.noise.rel_bias_g}};
  j["q_values"] = c.q_values;
  j["noise_levels"] = c.noise_levels;
  j["bias_levels"] = c.bias_levels;
  j["sam"] = {{"r", c.sam.r},
              {"m", c.sam.m},
              {"alpha", c.sam.alpha},
              {"delta0", c.sam.delta0},
              {"delta0_rel_x0", c.sam_delta0_rel_x0},
              {"delta_max", c.sam.delta_max},
              {"tau", c.sam.tau},
              {"max_iter", c.sam.max_iter},
              {"variant", variant_name(c.sam.variant)}};
  j["bfgs"] = {{"max_evals", c.bfgs.max_evals},
               {"grad_tol", c.bfgs.grad_tol},
               {"c1", c.bfgs.c1},
               {"c2", c.bfgs.c2},
               {"max_line_search_evals", c.bfgs.max_line_search_evals}};
  j["nelder_mead"] = {{"max_evals", c.nelder_mead.max_evals},
                      {"simplex_scale", c.nelder_mead.simplex_scale},
                      {"size_tol", c.nelder_mead.size_tol}};
  j["method"] = c.method;
  j["runs"] = c.runs;
  j["seed"] = c.seed;
  j["eig_count"] = c.eig_count;
  j["out"] = c.out;
  j["format"] = format_name(c.format);
  j["quiet"] = c.quiet;
  return j.dump();
}

std::string config_hash_hex(const ExperimentConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(
                    fnv1a64(config_to_json_text(config))));
  return buf;
}

SummaryStatistics summarize(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("summarize: empty input");
  for (double v : values)
    if (!std::isfinite(v))
      throw std::invalid_argument("summarize: non-finite value");
  std::sort(values.begin(), values.end());
  const auto quantile = [&](double p) {
    const double h = p * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= values.size()) return values.back();
    const double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
  };
  SummaryStatistics out;
  out.median = quantile(0.5);
  out.quantile_025 = quantile(0.025);
  out.quantile_975 = quantile(0.975);
  out.count = static_cast<int>(values.size());
  return out;
}

std::pair<double, double> bootstrap_median_ci(const std::vector<double>& values,
                                              int n_boot, std::uint64_t seed) {
  if (values.empty())
    throw std::invalid_argument("bootstrap: empty input");
  if (n_boot < 1) throw std::invalid_argument("bootstrap: n_boot must be >= 1");
  std::mt19937_64 engine(seed);
  const std::size_t n = values.size();
  std::vector<double> medians(n_boot);
  std::vector<double> resample(n);
  for (int b = 0; b < n_boot; ++b) {
    for (std::size_t i = 0; i < n; ++i)
      resample[i] = values[engine() % n];
    std::sort(resample.begin(), resample.end());
    medians[b] = (n % 2 == 1)
                     ? resample[n / 2]
                     : 0.5 * (resample[n / 2 - 1] + resample[n / 2]);
  }
  const SummaryStatistics stats = summarize(std::move(medians));
  return {stats.quantile_025, stats.quantile_975};
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t run,
                          std::uint64_t stream) {
  return splitmix64(splitmix64(splitmix64(master) ^ run) ^
                    splitmix64(stream ^ 0xA5A5A5A5A5A5A5A5ull));
}

Vector default_initial_point(const ProblemSpec& problem) {
  if (problem.kind == ProblemKind::quadratic)
    return initial_point_sin(1 << problem.p);
  return initial_point_alternating(problem.n);
}

ResultTable run_eig_study(const ExperimentConfig& config) {
  validate_config(config);
  ResultTable table = init_table(config);
  const int n = 1 << config.problem.p;
  const Vector x0 = initial_point_sin(n);
  const int m = config.sam.m;
  const double alpha = config.sam.alpha;
  const int count = std::min(config.eig_count, m);

  for (std::size_t qi = 0; qi < config.q_values.size(); ++qi) {
    const double q = config.q_values[qi];
    const SyntheticQuadratic reference(config.problem.p, q);

    // Zero-noise reference errors for this spectrum.
    {
      SyntheticQuadratic clean(config.problem.p, q);
      const Eval e0 = clean.eval(x0);
      const ArnoldiResult arn = arnoldi_sample(clean, x0, e0.f, e0.g, m, alpha);
      for (int i = 1; i <= std::min(count, arn.spectrum.m); ++i) {
        const double err = eigenvalue_error(arn.spectrum.eigenvalues[i - 1],
                                            reference.exact_hessian_eigenvalue(i));
        table.obs.push_back({-1, q, 0.0, config.noise.rel_bias_g, "arnoldi",
                             "eig_error", static_cast<double>(i), err});
        append_summary(table, q, 0.0, config.noise.rel_bias_g, "arnoldi",
                       "eig_error", i, {err});
      }
    }

    for (double level : config.noise_levels) {
      std::vector<std::vector<double>> errors(count);
      for (int run = 0; run < config.runs; ++run) {
        auto clean = make_clean_oracle(config.problem, q);
        NoiseModel noise = config.noise;
        noise.rel_sigma_g = level;
        const CalibratedNoise cal = calibrate_noise(noise, *clean, x0);
        // The stream depends on (seed, run, q) but not on the noise level, so
        // levels see scaled versions of the same draws.
        NoisyOracle noisy(clean, cal, derive_seed(config.seed, run, qi));
        const Eval e0 = noisy.eval(x0);
        const ArnoldiResult arn =
            arnoldi_sample(noisy, x0, e0.f, e0.g, m, alpha);
        for (int i = 1; i <= std::min(count, arn.spectrum.m); ++i) {
          const double err =
              eigenvalue_error(arn.spectrum.eigenvalues[i - 1],
                               reference.exact_hessian_eigenvalue(i));
          table.obs.push_back({run, q, level, config.noise.rel_bias_g,
                               "arnoldi", "eig_error", static_cast<double>(i),
                               err});
          errors[i - 1].push_back(err);
        }
      }
      for (int i = 1; i <= count; ++i)
        if (!errors[i - 1].empty())
          append_summary(table, q, level, config.noise.rel_bias_g, "arnoldi",
                         "eig_error", i, std::move(errors[i - 1]));
      log_line(config, "eig-study q=" + compact(q) + " noise=" + compact(level) +
                           " done (" + std::to_string(config.runs) + " runs)");
    }
  }
  return table;
}

ResultTable run_variant_compare(const ExperimentConfig& config) {
  validate_config(config);
  ResultTable table = init_table(config);
  const int n = 1 << config.problem.p;
  const Vector x0 = initial_point_sin(n);
  const int m = config.sam.m;
  const double alpha = config.sam.alpha;
  const double delta = resolve_delta0(config, x0);

  for (std::size_t qi = 0; qi < config.q_values.size(); ++qi) {
    const double q = config.q_values[qi];
    SyntheticQuadratic clean_reporter(config.problem.p, q);
    const double f0_clean = clean_reporter.eval(x0).f;

    for (double bias : config.bias_levels) {
      std::vector<double> ratios_avg, ratios_dir;
      for (int run = 0; run < config.runs; ++run) {
        auto clean = make_clean_oracle(config.problem, q);
        NoiseModel noise = config.noise;
        noise.rel_bias_g = bias;
        const CalibratedNoise cal = calibrate_noise(noise, *clean, x0);
        NoisyOracle noisy(clean, cal, derive_seed(config.seed, run, qi));
        const Eval e0 = noisy.eval(x0);
        const ArnoldiResult arn =
            arnoldi_sample(noisy, x0, e0.f, e0.g, m, alpha);
        const int r_eff = std::min(config.sam.r, arn.spectrum.m);
        const TruncatedSpectrum top = truncate_spectrum(arn.spectrum, r_eff);

        for (ModelVariant variant :
             {ModelVariant::step_average, ModelVariant::directional}) {
          ReducedQuadraticModel model =
              (variant == ModelVariant::step_average)
                  ? build_step_average(arn.samples, top.eigenvalues, top.eigvecs)
                  : build_directional(arn.samples, top.eigenvalues, top.eigvecs,
                                      arn.spectrum.reduced_eigvecs, alpha);
          const TrustRegionStep step = solve_trust_region_subproblem(
              model.g_red, model.lambda, delta);
          const Vector x_new = apply_step(model, step.y);
          // The reported relative change uses the clean objective.
          const double ratio = clean_reporter.eval(x_new).f / f0_clean;
          table.obs.push_back({run, q, config.noise.rel_sigma_g, bias,
                               variant_name(variant), "step_ratio", 0.0,
                               ratio});
          (variant == ModelVariant::step_average ? ratios_avg : ratios_dir)
              .push_back(ratio);
        }
      }
      append_summary(table, q, config.noise.rel_sigma_g, bias, "step_average",
                     "step_ratio", 0.0, std::move(ratios_avg));
      append_summary(table, q, config.noise.rel_sigma_g, bias, "directional",
                     "step_ratio", 0.0, std::move(ratios_dir));
      log_line(config, "variants q=" + compact(q) + " bias=" + compact(bias) +
                           " done (" + std::to_string(config.runs) + " runs)");
    }
  }
  return table;
}

namespace {

void emit_history(ResultTable& table, int run, double bias,
                  const std::string& method, const OptimizationTrace& trace,
                  ObjectiveOracle& clean_reporter, double f0_clean) {
  table.obs.push_back({run, kNaN, kNaN, bias, method, "history_f",
                       static_cast<double>(trace.initial_evals),
                       trace.initial_f});
  table.obs.push_back({run, kNaN, kNaN, bias, method, "history_ratio_clean",
                       static_cast<double>(trace.initial_evals), 1.0});
  for (const IterationRecord& rec : trace.iterations) {
    table.obs.push_back({run, kNaN, kNaN, bias, method, "history_f",
                         static_cast<double>(rec.evals), rec.f});
    table.obs.push_back({run, kNaN, kNaN, bias, method, "history_ratio_clean",
                         static_cast<double>(rec.evals),
                         clean_reporter.eval(rec.x).f / f0_clean});
  }
}

}  // namespace

ResultTable run_benchmark(const ExperimentConfig& config) {
  validate_config(config);
  ResultTable table = init_table(config);
  const Vector x0 = initial_point_alternating(config.problem.n);
  ModifiedRosenbrock clean_reporter(config.problem.n);
  const double f0_clean = clean_reporter.eval(x0).f;
  const double bias = config.noise.rel_bias_g;

  const std::vector<std::string> methods = {"sam_step_average",
                                            "sam_directional", "bfgs",
                                            "nelder_mead"};
  std::vector<std::vector<double>> ratios(methods.size());
  std::vector<std::vector<double>> evals(methods.size());

  for (int run = 0; run < config.runs; ++run) {
    long long matched_budget = 0;
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      auto clean = make_clean_oracle(config.problem, config.problem.q);
      const CalibratedNoise cal = calibrate_noise(config.noise, *clean, x0);
      NoisyOracle noisy(clean, cal, derive_seed(config.seed, run, mi));

      OptimizationTrace trace;
      if (mi <= 1) {
        SamConfig sc = config.sam;
        sc.delta0 = resolve_delta0(config, x0);
        sc.variant = (mi == 0) ? ModelVariant::step_average
                               : ModelVariant::directional;
        trace = sam_optimize(noisy, x0, sc);
        if (mi == 0) matched_budget = trace.total_evals;
      } else if (mi == 2) {
        BfgsConfig bc = config.bfgs;
        if (bc.max_evals <= 0) bc.max_evals = matched_budget;
        trace = bfgs_optimize(noisy, x0, bc);
      } else {
        NelderMeadConfig nc = config.nelder_mead;
        if (nc.max_evals <= 0) nc.max_evals = matched_budget;
        trace = nelder_mead_optimize(noisy, x0, nc);
      }

      const double ratio = clean_reporter.eval(trace.final_point).f / f0_clean;
      table.obs.push_back({run, kNaN, config.noise.rel_sigma_g, bias,
                           methods[mi], "final_ratio", 0.0, ratio});
      table.obs.push_back({run, kNaN, config.noise.rel_sigma_g, bias,
                           methods[mi], "total_evals", 0.0,
                           static_cast<double>(trace.total_evals)});
      emit_history(table, run, bias, methods[mi], trace, clean_reporter,
                   f0_clean);
      ratios[mi].push_back(ratio);
      evals[mi].push_back(static_cast<double>(trace.total_evals));
    }
    log_line(config, "benchmark run " + std::to_string(run + 1) + "/" +
                         std::to_string(config.runs) + " done");
  }

  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    append_summary(table, kNaN, config.noise.rel_sigma_g, bias, methods[mi],
                   "final_ratio", 0.0, std::move(ratios[mi]));
    append_summary(table, kNaN, config.noise.rel_sigma_g, bias, methods[mi],
                   "total_evals", 0.0, std::move(evals[mi]));
  }
  return table;
}

ResultTable run_single(const ExperimentConfig& config) {
  validate_config(config);
  ResultTable table = init_table(config);
  const Vector x0 = default_initial_point(config.problem);

  auto clean = make_clean_oracle(config.problem, config.problem.q);
  std::shared_ptr<ObjectiveOracle> clean_reporter_ptr =
      make_clean_oracle(config.problem, config.problem.q);
  ObjectiveOracle& clean_reporter = *clean_reporter_ptr;
  const double f0_clean = clean_reporter.eval(x0).f;

  std::shared_ptr<ObjectiveOracle> oracle = clean;
  if (config.noise.kind == NoiseKind::gaussian) {
    const CalibratedNoise cal = calibrate_noise(config.noise, *clean, x0);
    oracle = std::make_shared<NoisyOracle>(clean, cal,
                                           derive_seed(config.seed, 0, 0));
  }

  OptimizationTrace trace;
  std::string method = config.method == "sam" ? "sam_step_average" : config.method;
  if (method == "sam_step_average" || method == "sam_directional") {
    SamConfig sc = config.sam;
    sc.delta0 = resolve_delta0(config, x0);
    sc.variant = (method == "sam_directional") ? ModelVariant::directional
                                               : ModelVariant::step_average;
    trace = sam_optimize(*oracle, x0, sc);
  } else if (method == "bfgs") {
    trace = bfgs_optimize(*oracle, x0, config.bfgs);
  } else {
    trace = nelder_mead_optimize(*oracle, x0, config.nelder_mead);
  }

  const double bias = config.noise.rel_bias_g;
  for (const IterationRecord& rec : trace.iterations) {
    const double it = static_cast<double>(rec.iter);
    table.obs.push_back({0, kNaN, kNaN, bias, method, "iter_f", it, rec.f});
    table.obs.push_back({0, kNaN, kNaN, bias, method, "iter_model_grad_norm",
                         it, rec.model_grad_norm});
    table.obs.push_back({0, kNaN, kNaN, bias, method, "iter_trust_radius", it,
                         rec.trust_radius});
    table.obs.push_back({0, kNaN, kNaN, bias, method, "iter_rho", it, rec.rho});
    table.obs.push_back({0, kNaN, kNaN, bias, method, "iter_step_norm", it,
                         rec.step_norm});
    table.obs.push_back({0, kNaN, kNaN, bias, method, "iter_accepted", it,
                         rec.accepted ? 1.0 : 0.0});
    table.obs.push_back({0, kNaN, kNaN, bias, method, "iter_evals", it,
                         static_cast<double>(rec.evals)});
  }
  table.obs.push_back({0, kNaN, kNaN, bias, method, "final_f", 0.0,
                       trace.final_f});
  table.obs.push_back({0, kNaN, kNaN, bias, method, "final_ratio_clean", 0.0,
                       clean_reporter.eval(trace.final_point).f / f0_clean});
  table.obs.push_back({0, kNaN, kNaN, bias, method, "total_evals", 0.0,
                       static_cast<double>(trace.total_evals)});
  table.obs.push_back({0, kNaN, kNaN, bias, method,
                       "terminated_" + to_string(trace.reason), 0.0, 1.0});
  return table;
}

ResultTable run_experiment(const ExperimentConfig& config) {
  switch (config.experiment) {
    case ExperimentKind::eig_study: return run_eig_study(config);
    case ExperimentKind::variant_compare: return run_variant_compare(config);
    case ExperimentKind::benchmark: return run_benchmark(config);
    case ExperimentKind::single_run: return run_single(config);
  }
  throw ConfigError("unknown experiment kind");
}

void write_csv(const ResultTable& table, std::ostream& os) {
  os << "row,config_hash,seed,run,q,noise,bias,method,quantity,index,value,"
        "median,q025,q975,count\n";
  for (const Observation& o : table.obs) {
    os << "obs," << table.config_hash << ',' << table.seed << ',' << o.run
       << ',' << opt_compact(o.q) << ',' << opt_compact(o.noise) << ','
       << opt_compact(o.bias) << ',' << o.method << ',' << o.quantity << ','
       << compact(o.index) << ',' << sci(o.value) << ",,,,\n";
  }
  for (const SummaryRow& s : table.summary) {
    os << "summary," << table.config_hash << ',' << table.seed << ",,"
       << opt_compact(s.q) << ',' << opt_compact(s.noise) << ','
       << opt_compact(s.bias) << ',' << s.method << ',' << s.quantity << ','
       << compact(s.index) << ",," << opt_sci(s.stats.median) << ','
       << opt_sci(s.stats.quantile_025) << ',' << opt_sci(s.stats.quantile_975)
       << ',' << s.stats.count << "\n";
  }
}

void write_json(const ResultTable& table, std::ostream& os) {
  json root;
  root["config"] = json::parse(table.config_json);
  root["config_hash"] = table.config_hash;
  root["seed"] = table.seed;
  root["runs"] = json::array();
  for (const Observation& o : table.obs)
    root["runs"].push_back(obs_to_json(o));
  root["summary"] = json::array();
  for (const SummaryRow& s : table.summary) {
    json row;
    if (!std::isnan(s.q)) row["q"] = s.q;
    if (!std::isnan(s.noise)) row["noise"] = s.noise;
    if (!std::isnan(s.bias)) row["bias"] = s.bias;
    row["method"] = s.method;
    row["quantity"] = s.quantity;
    row["index"] = s.index;
    row["median"] = s.stats.median;
    row["q025"] = s.stats.quantile_025;
    row["q975"] = s.stats.quantile_975;
    row["count"] = s.stats.count;
    root["summary"].push_back(row);
  }
  os << root.dump(2) << "\n";
}

void write_result(const ResultTable& table, const ExperimentConfig& config) {
  const auto emit = [&](std::ostream& os) {
    if (config.format == OutputFormat::csv)
      write_csv(table, os);
    else
      write_json(table, os);
  };
  if (config.out.empty()) {
    emit(std::cout);
    return;
  }
  std::ofstream out(config.out, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file '" + config.out + "'");
  emit(out);
  if (!out) throw std::runtime_error("failed writing output file '" + config.out + "'");
}

}  // namespace samopt
