#include "hybridcap/cli.hpp"

#include <CLI11.hpp>
#include <toml.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>

#include "hybridcap/error.hpp"
#include "hybridcap/mc_oracle.hpp"
#include "hybridcap/noise_model.hpp"

#ifndef HYBRIDCAP_VERSION
#define HYBRIDCAP_VERSION "0.0.0"
#endif

namespace hybridcap::cli {

namespace {

constexpr std::pair<Command, std::string_view> kCommands[] = {
    {Command::kNoisePdf, "noise-pdf"},           {Command::kEntropy, "entropy"},
    {Command::kMutualInfo, "mutual-info"},       {Command::kCapacity, "capacity"},
    {Command::kSweepMi, "sweep-mi"},             {Command::kSweepCapacity, "sweep-capacity"},
    {Command::kValidate, "validate"},
};

/// A numerical operation failed; maps to exit code 1.
class StepFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Runs one named pipeline step, tagging library errors with the step name.
template <class F>
auto step(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const InvalidParams& e) {
    throw ConfigError(std::string(name) + ": " + e.what());
  } catch (const Error& e) {
    throw StepFailure(std::string(name) + " failed: " + e.what());
  }
}

std::string join(const std::vector<double>& values, char sep) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) {
      out += sep;
    }
    out += format_number(values[i]);
  }
  return out;
}

std::string trunc_label(const NoiseParams& params) {
  if (const auto* fixed = std::get_if<FixedTerms>(&params.trunc.mode)) {
    return "fixed:" + std::to_string(fixed->n);
  }
  return "tail:" + format_number(std::get<TailBound>(params.trunc.mode).epsilon);
}

// Values collected from flags or the TOML file before defaults are applied.
struct Overrides {
  std::optional<double> lambda, mu, sigma, mu_x, tol, tail_eps, refine_tol;
  std::optional<std::string> mode, out, sweep_var;
  std::optional<int> trunc_n, points;
  std::optional<bool> include_zero;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> grid, samples, threads;
  std::optional<std::vector<double>> values;

  void merge_from(const Overrides& o) {
    auto take = [](auto& dst, const auto& src) {
      if (src) {
        dst = src;
      }
    };
    take(lambda, o.lambda);
    take(mu, o.mu);
    take(sigma, o.sigma);
    take(mu_x, o.mu_x);
    take(tol, o.tol);
    take(tail_eps, o.tail_eps);
    take(refine_tol, o.refine_tol);
    take(mode, o.mode);
    take(out, o.out);
    take(sweep_var, o.sweep_var);
    take(trunc_n, o.trunc_n);
    take(points, o.points);
    take(include_zero, o.include_zero);
    take(seed, o.seed);
    take(grid, o.grid);
    take(samples, o.samples);
    take(threads, o.threads);
    take(values, o.values);
  }
};

template <class T>
std::optional<T> toml_number(const toml::node& node, const std::string& key) {
  if constexpr (std::is_floating_point_v<T>) {
    if (auto v = node.value<double>()) {
      return *v;
    }
  } else {
    if (auto v = node.value<std::int64_t>()) {
      if (*v < 0) {
        throw ConfigError("config key '" + key + "' must be nonnegative");
      }
      return static_cast<T>(*v);
    }
  }
  throw ConfigError("config key '" + key + "' has the wrong type");
}

Overrides load_toml(const std::string& path) {
  toml::table table;
  try {
    table = toml::parse_file(path);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "config: cannot parse '" << path << "': " << e.description();
    throw ConfigError(msg.str());
  }
  Overrides o;
  for (const auto& [k, node] : table) {
    const std::string key(k.str());
    if (key == "lambda") {
      o.lambda = toml_number<double>(node, key);
    } else if (key == "mu") {
      o.mu = toml_number<double>(node, key);
    } else if (key == "sigma") {
      o.sigma = toml_number<double>(node, key);
    } else if (key == "mu-x") {
      o.mu_x = toml_number<double>(node, key);
    } else if (key == "tol") {
      o.tol = toml_number<double>(node, key);
    } else if (key == "tail-eps") {
      o.tail_eps = toml_number<double>(node, key);
    } else if (key == "refine-tol") {
      o.refine_tol = toml_number<double>(node, key);
    } else if (key == "trunc-n") {
      o.trunc_n = toml_number<int>(node, key);
    } else if (key == "points") {
      o.points = toml_number<int>(node, key);
    } else if (key == "seed") {
      o.seed = toml_number<std::uint64_t>(node, key);
    } else if (key == "grid") {
      o.grid = toml_number<std::size_t>(node, key);
    } else if (key == "samples") {
      o.samples = toml_number<std::size_t>(node, key);
    } else if (key == "threads") {
      o.threads = toml_number<std::size_t>(node, key);
    } else if (key == "include-zero") {
      if (auto v = node.value<bool>()) {
        o.include_zero = *v;
      } else {
        throw ConfigError("config key 'include-zero' must be a boolean");
      }
    } else if (key == "mode" || key == "out" || key == "sweep-var") {
      auto v = node.value<std::string>();
      if (!v) {
        throw ConfigError("config key '" + key + "' must be a string");
      }
      (key == "mode" ? o.mode : key == "out" ? o.out : o.sweep_var) = *v;
    } else if (key == "values") {
      const auto* arr = node.as_array();
      if (arr == nullptr) {
        throw ConfigError("config key 'values' must be an array of numbers");
      }
      std::vector<double> values;
      for (const auto& item : *arr) {
        auto v = item.value<double>();
        if (!v) {
          throw ConfigError("config key 'values' must be an array of numbers");
        }
        values.push_back(*v);
      }
      o.values = std::move(values);
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  return o;
}

RunConfig apply(Command command, const Overrides& o) {
  RunConfig cfg;
  cfg.command = command;
  if (o.lambda) cfg.params.lambda = *o.lambda;
  if (o.mu) cfg.params.mu = *o.mu;
  if (o.sigma) cfg.params.sigma = *o.sigma;
  if (o.mu_x) cfg.est.mu_x = *o.mu_x;
  if (o.tol) cfg.qspec.rel_tol = *o.tol;
  if (o.include_zero) cfg.params.trunc.include_zero_term = *o.include_zero;
  if (o.trunc_n && o.tail_eps) {
    throw ConfigError("trunc-n and tail-eps are mutually exclusive");
  }
  if (o.trunc_n) cfg.params.trunc.mode = FixedTerms{*o.trunc_n};
  if (o.tail_eps) cfg.params.trunc.mode = TailBound{*o.tail_eps};
  if (o.mode) {
    try {
      cfg.mode = parse_density_mode(*o.mode);
    } catch (const InvalidParams& e) {
      throw ConfigError(e.what());
    }
  }
  if (o.out) cfg.output_path = *o.out;
  if (o.seed) cfg.seed = *o.seed;
  if (o.points) cfg.points = *o.points;
  if (o.grid) cfg.ospec.grid_points = *o.grid;
  if (o.refine_tol) cfg.ospec.refine_tol = *o.refine_tol;
  if (o.sweep_var) cfg.sweep_var = *o.sweep_var;
  if (o.values) cfg.values = *o.values;
  if (o.samples) cfg.samples = *o.samples;
  if (o.threads) cfg.threads = *o.threads;
  return cfg;
}

void write_header(std::ostream& os, const RunConfig& cfg, std::initializer_list<std::string_view> columns) {
  os << metadata_line(cfg) << '\n';
  bool first = true;
  for (auto c : columns) {
    os << (first ? "" : ",") << c;
    first = false;
  }
  os << '\n';
}

template <class... T>
void write_row(std::ostream& os, const T&... cells) {
  bool first = true;
  auto cell = [&](const auto& v) {
    os << (first ? "" : ",");
    first = false;
    if constexpr (std::is_floating_point_v<std::decay_t<decltype(v)>>) {
      os << format_number(v);
    } else {
      os << v;
    }
  };
  (cell(cells), ...);
  os << '\n';
}

void cmd_noise_pdf(const RunConfig& cfg, std::ostream& csv) {
  const NoiseTable table = step("tabulate_noise", [&] { return tabulate_noise(cfg.params, cfg.effective_points()); });
  write_header(csv, cfg, {"z", "f_Z", "neg_fZ_log2_fZ"});
  for (std::size_t i = 0; i < table.density.abscissae.size(); ++i) {
    write_row(csv, table.density.abscissae[i], table.density.densities[i], table.entropy_integrand[i]);
  }
}

void cmd_entropy(const RunConfig& cfg, std::ostream& csv) {
  const double hz = step("noise_entropy", [&] { return noise_entropy(cfg.params, cfg.qspec); });
  const double hy = step("received_entropy", [&] {
    return received_entropy(cfg.est, cfg.params, cfg.qspec, cfg.effective_mode());
  });
  write_header(csv, cfg, {"mu_x", "h_z_bits", "h_y_bits"});
  write_row(csv, cfg.est.mu_x, hz, hy);
}

void cmd_mutual_info(const RunConfig& cfg, std::ostream& csv) {
  const double hz = step("noise_entropy", [&] { return noise_entropy(cfg.params, cfg.qspec); });
  const double hy = step("received_entropy", [&] {
    return received_entropy(cfg.est, cfg.params, cfg.qspec, cfg.effective_mode());
  });
  write_header(csv, cfg, {"mu_x", "mi_bits", "h_y_bits", "h_z_bits"});
  write_row(csv, cfg.est.mu_x, hy - hz, hy, hz);
}

void cmd_capacity(const RunConfig& cfg, std::ostream& csv) {
  const CapacityResult r = step("channel_capacity", [&] {
    return channel_capacity(cfg.params, cfg.qspec, cfg.ospec, cfg.effective_mode());
  });
  write_header(csv, cfg,
               {"mu_x_star", "capacity_bits", "grid_mu_x_star", "grid_capacity_bits", "evaluations",
                "non_unimodal_warning"});
  write_row(csv, r.mu_x_star, r.capacity_bits, r.grid_mu_x_star, r.grid_capacity_bits, r.evaluations,
            r.non_unimodal_warning ? 1 : 0);
}

void cmd_sweep_mi(const RunConfig& cfg, std::ostream& csv) {
  const SweepTable t = step("sweep_mi_vs_mux", [&] {
    return sweep_mi_vs_mux(cfg.params, cfg.qspec, cfg.effective_points(), cfg.effective_mode());
  });
  write_header(csv, cfg, {"mu_x", "mi_bits"});
  for (const SweepRow& row : t.rows) {
    write_row(csv, row.x, row.bits);
  }
}

void cmd_sweep_capacity(const RunConfig& cfg, std::ostream& csv) {
  const std::vector<double> values = cfg.effective_values();
  const bool by_sigma = cfg.sweep_var == "sigma";
  const SweepTable t = step(by_sigma ? "sweep_capacity_vs_sigma" : "sweep_capacity_vs_lambda", [&] {
    return by_sigma ? sweep_capacity_vs_sigma(cfg.params, values, cfg.qspec, cfg.ospec,
                                              cfg.effective_mode(), cfg.threads)
                    : sweep_capacity_vs_lambda(cfg.params, values, cfg.qspec, cfg.ospec,
                                               cfg.effective_mode(), cfg.threads);
  });
  write_header(csv, cfg, {by_sigma ? "sigma" : "lambda", "snr", "capacity_bits", "mu_x_star", "sigma_z_param", "lambda_param"});
  for (const SweepRow& row : t.rows) {
    write_row(csv, row.x, row.snr, row.bits, row.mu_x_star, row.sigma, row.lambda);
  }
}

struct Check {
  std::string name;
  double value;
  double threshold;
  bool pass;
};

bool cmd_validate(const RunConfig& cfg, std::ostream& csv, std::ostream& log) {
  const NoiseParams& p = cfg.params;
  const double scale = std::sqrt(1e6 / static_cast<double>(cfg.samples));
  std::vector<Check> checks;
  auto add = [&](std::string name, double value, double threshold) {
    checks.push_back({std::move(name), value, threshold, std::isfinite(value) && value <= threshold});
  };

  const HybridNoise noise(p);
  const double mass = step("quadrature mass", [&] {
    const auto bp = noise.breakpoints(noise_support(p));
    return integrate([&](double z) { return noise.pdf(z); }, bp, cfg.qspec).value;
  });
  add("normalization", std::abs(mass - noise.mass()), 1e-9);

  const double q1 = step("moment_by_quadrature", [&] { return moment_by_quadrature(p, 1, cfg.qspec); }) / mass;
  const double q2 = step("moment_by_quadrature", [&] { return moment_by_quadrature(p, 2, cfg.qspec); }) / mass;
  Moments model{q1, q2 - q1 * q1};
  if (p.trunc.include_zero_term) {
    model = hybrid_moments(p);
    add("quadrature_mean", std::abs(q1 - model.mean), 1e-5);
    add("quadrature_second_moment", std::abs(q2 - (model.variance + model.mean * model.mean)), 1e-5);
  }

  const std::vector<double> samples =
      step("sample_hybrid", [&] { return sample_hybrid(p, SampleSpec{cfg.samples, cfg.seed}, cfg.threads); });
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= static_cast<double>(samples.size());
  double var = 0.0;
  for (double x : samples) var += (x - mean) * (x - mean);
  var /= static_cast<double>(samples.size() > 1 ? samples.size() - 1 : 1);
  add("mc_mean", std::abs(mean - model.mean), 0.1 * scale);
  add("mc_variance_rel", std::abs(var - model.variance) / model.variance, 0.02 * scale);

  const double ks = step("ks_distance", [&] { return ks_distance(samples, p, cfg.qspec); });
  add("ks_distance", ks, 0.002 * scale);

  // Samples come from the renormalized mixture: h(g / m) = (h(g) + m log2 m) / m.
  const double h = (step("noise_entropy", [&] { return noise_entropy(p, cfg.qspec); }) +
                    mass * std::log2(mass)) /
                   mass;
  const EntropyEstimate est = step("empirical_entropy", [&] {
    return empirical_entropy(samples, HistogramSpec{512, noise_support(p)});
  });
  add("empirical_entropy", std::abs(est.bits - h), 0.03 * scale);

  bool all = true;
  write_header(csv, cfg, {"check", "value", "threshold", "pass"});
  for (const Check& c : checks) {
    log << (c.pass ? "PASS " : "FAIL ") << c.name << " value=" << format_number(c.value)
        << " threshold=" << format_number(c.threshold) << '\n';
    write_row(csv, c.name, c.value, c.threshold, c.pass ? 1 : 0);
    all = all && c.pass;
  }
  return all;
}

}  // namespace

std::string_view to_string(Command command) {
  for (const auto& [c, name] : kCommands) {
    if (c == command) {
      return name;
    }
  }
  return "unknown";
}

DensityMode RunConfig::effective_mode() const {
  if (mode) {
    return *mode;
  }
  return command == Command::kSweepCapacity ? DensityMode::kNormalized : DensityMode::kPaperLiteral;
}

int RunConfig::effective_points() const {
  if (points) {
    return *points;
  }
  return command == Command::kSweepMi ? 65 : 2001;
}

std::vector<double> RunConfig::effective_values() const {
  if (values) {
    return *values;
  }
  if (sweep_var == "lambda") {
    return {0.0, 2.5, 5.0, 7.5, 10.0};
  }
  return {5.0, 10.0, 15.0, 20.0, 25.0};
}

void RunConfig::validate() const {
  auto guard = [](const char* field, auto&& fn) {
    try {
      fn();
    } catch (const InvalidParams& e) {
      throw ConfigError(std::string("invalid ") + field + ": " + e.what());
    }
  };
  guard("noise parameters", [&] { params.validate(); });
  guard("mu-x", [&] { est.validate(); });
  guard("tol", [&] { qspec.validate(); });
  guard("grid/refine-tol", [&] { ospec.validate(); });
  if (effective_points() < 2) {
    throw ConfigError("invalid points: must be >= 2");
  }
  if (sweep_var != "sigma" && sweep_var != "lambda") {
    throw ConfigError("invalid sweep-var: must be 'sigma' or 'lambda', got '" + sweep_var + "'");
  }
  if (values && values->empty()) {
    throw ConfigError("invalid values: list is empty");
  }
  if (samples < 1) {
    throw ConfigError("invalid samples: must be >= 1");
  }
  if (threads < 1) {
    throw ConfigError("invalid threads: must be >= 1");
  }
  if ((command == Command::kEntropy || command == Command::kMutualInfo) &&
      effective_mode() == DensityMode::kNormalized && est.mu_x == 0.0) {
    throw ConfigError("invalid mu-x: normalized mode needs mu-x > 0");
  }
}

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

std::string metadata_line(const RunConfig& cfg) {
  std::ostringstream os;
  os << "# hybridcap " << HYBRIDCAP_VERSION << " command=" << to_string(cfg.command)
     << " lambda=" << format_number(cfg.params.lambda) << " mu=" << format_number(cfg.params.mu)
     << " sigma=" << format_number(cfg.params.sigma) << " mu_x=" << format_number(cfg.est.mu_x)
     << " mode=" << hybridcap::to_string(cfg.effective_mode()) << " trunc=" << trunc_label(cfg.params)
     << " include_zero=" << (cfg.params.trunc.include_zero_term ? "true" : "false")
     << " points=" << cfg.effective_points() << " rel_tol=" << format_number(cfg.qspec.rel_tol)
     << " abs_tol=" << format_number(cfg.qspec.abs_tol) << " grid=" << cfg.ospec.grid_points
     << " refine_tol=" << format_number(cfg.ospec.refine_tol) << " sweep_var=" << cfg.sweep_var
     << " values=" << join(cfg.effective_values(), ';') << " samples=" << cfg.samples
     << " seed=" << cfg.seed;
  return os.str();
}

RunConfig parse_args(int argc, const char* const* argv) {
  CLI::App app{"Hybrid Poisson-Gaussian noise: entropies, mutual information and capacity"};
  app.set_version_flag("--version", HYBRIDCAP_VERSION);
  app.require_subcommand(1);

  Overrides flags;
  std::string config_path;
  std::string include_zero;
  app.add_option("--config", config_path, "TOML file with defaults; flags override it");
  app.add_option("--lambda", flags.lambda, "Poisson rate");
  app.add_option("--mu", flags.mu, "Gaussian mean");
  app.add_option("--sigma", flags.sigma, "Gaussian standard deviation");
  app.add_option("--mu-x", flags.mu_x, "transmit point estimate in [0, 2*pi]");
  app.add_option("--mode", flags.mode, "paper-literal | normalized");
  app.add_option("--trunc-n", flags.trunc_n, "keep Poisson terms up to n (default 100)");
  app.add_option("--tail-eps", flags.tail_eps, "keep Poisson terms until the tail mass < eps");
  app.add_option("--include-zero", include_zero, "keep the n = 0 Poisson term (true|false)");
  app.add_option("--points", flags.points, "grid points for noise-pdf / sweep-mi");
  app.add_option("--tol", flags.tol, "relative quadrature tolerance");
  app.add_option("--seed", flags.seed, "Monte-Carlo seed");
  app.add_option("--out", flags.out, "output CSV path (default stdout)");
  app.add_option("--grid", flags.grid, "coarse optimizer grid points");
  app.add_option("--refine-tol", flags.refine_tol, "golden-section abscissa tolerance");
  app.add_option("--sweep-var", flags.sweep_var, "sigma | lambda");
  app.add_option("--values", flags.values, "sweep values")->delimiter(',');
  app.add_option("--samples", flags.samples, "Monte-Carlo sample count");
  app.add_option("--threads", flags.threads, "worker threads");

  std::vector<std::pair<CLI::App*, Command>> subs;
  for (const auto& [command, name] : kCommands) {
    subs.emplace_back(app.add_subcommand(std::string(name))->fallthrough(), command);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    throw;
  } catch (const CLI::CallForVersion&) {
    throw;
  } catch (const CLI::ParseError& e) {
    throw ConfigError(std::string("command line: ") + e.what());
  }

  if (!include_zero.empty()) {
    if (include_zero == "true" || include_zero == "1") {
      flags.include_zero = true;
    } else if (include_zero == "false" || include_zero == "0") {
      flags.include_zero = false;
    } else {
      throw ConfigError("invalid include-zero: expected true or false, got '" + include_zero + "'");
    }
  }

  Command command = Command::kNoisePdf;
  for (const auto& [sub, c] : subs) {
    if (sub->parsed()) {
      command = c;
    }
  }

  Overrides merged;
  if (!config_path.empty()) {
    merged = load_toml(config_path);
  }
  merged.merge_from(flags);
  RunConfig cfg = apply(command, merged);
  cfg.validate();
  return cfg;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    config.validate();
    std::ostringstream csv;
    bool ok = true;
    switch (config.command) {
      case Command::kNoisePdf:
        cmd_noise_pdf(config, csv);
        break;
      case Command::kEntropy:
        cmd_entropy(config, csv);
        break;
      case Command::kMutualInfo:
        cmd_mutual_info(config, csv);
        break;
      case Command::kCapacity:
        cmd_capacity(config, csv);
        break;
      case Command::kSweepMi:
        cmd_sweep_mi(config, csv);
        break;
      case Command::kSweepCapacity:
        cmd_sweep_capacity(config, csv);
        break;
      case Command::kValidate:
        ok = cmd_validate(config, csv, out);
        break;
    }
    const std::string text = csv.str();
    if (config.output_path.empty() || config.output_path == "-") {
      if (config.command != Command::kValidate) {
        out << text;
      }
    } else {
      std::ofstream file(config.output_path, std::ios::binary | std::ios::trunc);
      if (!file) {
        throw ConfigError("invalid out: cannot open '" + config.output_path + "' for writing");
      }
      file << text;
      if (!file) {
        throw StepFailure("writing '" + config.output_path + "' failed");
      }
    }
    return ok ? kExitOk : kExitNumerical;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const StepFailure& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_args(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << "usage: hybridcap {noise-pdf|entropy|mutual-info|capacity|sweep-mi|sweep-capacity|validate} "
           "[--lambda L] [--mu M] [--sigma S] [--mu-x X] [--mode paper-literal|normalized] "
           "[--trunc-n N | --tail-eps E] [--include-zero true|false] [--points P] [--tol T] "
           "[--grid G] [--refine-tol R] [--sweep-var sigma|lambda] [--values v1,v2,...] "
           "[--samples N] [--seed S] [--threads T] [--out FILE] [--config FILE.toml]\n";
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << "hybridcap " << HYBRIDCAP_VERSION << '\n';
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return run(cfg, out, err);
}

}  // namespace hybridcap::cli
