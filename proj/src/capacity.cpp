#include "hybridcap/capacity.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <thread>

#include "hybridcap/error.hpp"
#include "hybridcap/noise_model.hpp"

namespace hybridcap {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

class MiEvaluator {
 public:
  MiEvaluator(const NoiseParams& params, const QuadratureSpec& spec, DensityMode mode)
      : density_(params), spec_(spec), mode_(mode), h_noise_(noise_entropy(params, spec)) {}

  double operator()(double mu_x) {
    ++evaluations_;
    if (mode_ == DensityMode::kPaperLiteral) {
      return density_.literal_entropy(mu_x, spec_) - h_noise_;
    }
    if (!normalized_mi_) {
      normalized_mi_ = density_.normalized_entropy(spec_) - h_noise_;
    }
    return *normalized_mi_;
  }

  std::size_t evaluations() const { return evaluations_; }
  const ReceivedDensity& density() const { return density_; }

 private:
  ReceivedDensity density_;
  QuadratureSpec spec_;
  DensityMode mode_;
  double h_noise_;
  std::optional<double> normalized_mi_;
  std::size_t evaluations_ = 0;
};

std::vector<double> uniform_grid(std::size_t n) {
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) {
    grid[i] = kTwoPi * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  grid.back() = kTwoPi;
  return grid;
}

double noise_sigma(const NoiseParams& params, const QuadratureSpec& spec) {
  if (params.trunc.include_zero_term) {
    return std::sqrt(hybrid_moments(params).variance);
  }
  const double mass = HybridNoise(params).mass();
  if (!(mass > 0.0)) {
    throw DegenerateInput("noise density has zero mass");
  }
  const double m1 = moment_by_quadrature(params, 1, spec) / mass;
  const double m2 = moment_by_quadrature(params, 2, spec) / mass;
  return std::sqrt(m2 - m1 * m1);
}

// mu_Y does not depend on mu_x, so the SNR is a property of the noise alone.
double snr_of(const ReceivedDensity& density, const QuadratureSpec& spec) {
  return density.mean(spec) / noise_sigma(density.noise().params(), spec);
}

template <class Row>
std::vector<SweepRow> run_rows(std::size_t n, std::size_t threads, Row&& row) {
  std::vector<SweepRow> rows(n);
  std::vector<std::exception_ptr> failures(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        rows[i] = row(i);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const std::size_t pool = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  if (pool == 1) {
    worker();
  } else {
    std::vector<std::jthread> workers;
    for (std::size_t t = 0; t < pool; ++t) {
      workers.emplace_back(worker);
    }
  }
  for (const auto& failure : failures) {
    if (failure) {
      std::rethrow_exception(failure);
    }
  }
  return rows;
}

void require_increasing(std::span<const double> values, const char* name, bool allow_zero) {
  if (values.empty()) {
    throw InvalidParams(std::string(name) + " sweep needs at least one value");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!std::isfinite(v) || v < 0.0 || (!allow_zero && v == 0.0)) {
      throw InvalidParams(std::string(name) + " sweep values must be " +
                          (allow_zero ? "nonnegative" : "positive"));
    }
    if (i > 0 && !(v > values[i - 1])) {
      throw InvalidParams(std::string(name) + " sweep values must be strictly increasing");
    }
  }
}

SweepRow capacity_row(const NoiseParams& params, double x, const QuadratureSpec& qspec,
                      const OptimizerSpec& ospec, DensityMode mode) {
  const CapacityResult result = channel_capacity(params, qspec, ospec, mode);
  SweepRow row;
  row.x = x;
  row.bits = result.capacity_bits;
  row.snr = snr_of(ReceivedDensity(params), qspec);
  row.sigma = params.sigma;
  row.lambda = params.lambda;
  row.mu_x_star = result.mu_x_star;
  return row;
}

}  // namespace

void OptimizerSpec::validate() const {
  if (grid_points < 8) {
    throw InvalidParams("grid points must be >= 8");
  }
  if (!(refine_tol > 0.0) || !std::isfinite(refine_tol)) {
    throw InvalidParams("refine tolerance must be positive");
  }
}

double mutual_information(const TransmitEstimate& est, const NoiseParams& params,
                          const QuadratureSpec& spec, DensityMode mode) {
  return received_entropy(est, params, spec, mode) - noise_entropy(params, spec);
}

CapacityResult channel_capacity(const NoiseParams& params, const QuadratureSpec& qspec,
                                const OptimizerSpec& ospec, DensityMode mode) {
  params.validate();
  qspec.validate();
  ospec.validate();

  MiEvaluator mi(params, qspec, mode);
  CapacityResult result;
  result.mode = mode;

  const std::vector<double> grid = uniform_grid(ospec.grid_points);
  result.grid_cell = grid[1] - grid[0];
  std::size_t best = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double value = mi(grid[i]);
    result.mi_curve.push_back({grid[i], value});
    if (value > result.mi_curve[best].mi_bits) {
      best = i;
    }
  }
  result.grid_mu_x_star = grid[best];
  result.grid_capacity_bits = result.mi_curve[best].mi_bits;

  const double lo = grid[best == 0 ? 0 : best - 1];
  const double hi = grid[std::min(best + 1, grid.size() - 1)];

  // Golden-section maximization on [lo, hi]; ties move left.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = mi(c);
  double fd = mi(d);
  result.mi_curve.push_back({c, fc});
  result.mi_curve.push_back({d, fd});
  MiPoint probe_best = fc >= fd ? MiPoint{c, fc} : MiPoint{d, fd};

  std::size_t iters = 0;
  while (b - a > ospec.refine_tol && iters < ospec.max_refine_iters) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = mi(c);
      result.mi_curve.push_back({c, fc});
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = mi(d);
      result.mi_curve.push_back({d, fd});
    }
    const MiPoint& latest = result.mi_curve.back();
    if (latest.mi_bits > probe_best.mi_bits ||
        (latest.mi_bits == probe_best.mi_bits && latest.mu_x < probe_best.mu_x)) {
      probe_best = latest;
    }
    ++iters;
  }
  result.refine_iterations = iters;

  const double settled = 0.5 * (a + b);
  const bool at_lo = best > 0 && settled - lo <= ospec.refine_tol &&
                     result.mi_curve[best - 1].mi_bits < result.grid_capacity_bits;
  const bool at_hi = best + 1 < grid.size() && hi - settled <= ospec.refine_tol &&
                     result.mi_curve[best + 1].mi_bits < result.grid_capacity_bits;
  result.non_unimodal_warning = at_lo || at_hi;

  if (probe_best.mi_bits > result.grid_capacity_bits) {
    result.mu_x_star = probe_best.mu_x;
    result.capacity_bits = probe_best.mi_bits;
  } else {
    result.mu_x_star = result.grid_mu_x_star;
    result.capacity_bits = result.grid_capacity_bits;
  }
  result.evaluations = mi.evaluations();
  return result;
}

double snr(const TransmitEstimate& est, const NoiseParams& params, const QuadratureSpec& spec) {
  const double mean = received_mean(est, params, spec);
  return mean / noise_sigma(params, spec);
}

SweepTable sweep_mi_vs_mux(const NoiseParams& params, const QuadratureSpec& qspec, int n_points,
                           DensityMode mode) {
  if (n_points < 2) {
    throw InvalidParams("points must be >= 2, got " + std::to_string(n_points));
  }
  params.validate();
  qspec.validate();
  MiEvaluator mi(params, qspec, mode);
  const double ratio = snr_of(mi.density(), qspec);

  SweepTable table;
  table.mode = mode;
  for (double mu_x : uniform_grid(static_cast<std::size_t>(n_points))) {
    SweepRow row;
    row.x = mu_x;
    row.bits = mi(mu_x);
    row.snr = ratio;
    row.sigma = params.sigma;
    row.lambda = params.lambda;
    row.mu_x_star = mu_x;
    row.degenerate = mode == DensityMode::kNormalized && mu_x == 0.0;
    table.rows.push_back(row);
  }
  return table;
}

SweepTable sweep_capacity_vs_sigma(const NoiseParams& base, std::span<const double> sigma_values,
                                   const QuadratureSpec& qspec, const OptimizerSpec& ospec,
                                   DensityMode mode, std::size_t threads) {
  require_increasing(sigma_values, "sigma", false);
  SweepTable table;
  table.mode = mode;
  table.rows = run_rows(sigma_values.size(), threads, [&](std::size_t i) {
    NoiseParams p = base;
    p.sigma = sigma_values[i];
    return capacity_row(p, sigma_values[i], qspec, ospec, mode);
  });
  return table;
}

SweepTable sweep_capacity_vs_lambda(const NoiseParams& base, std::span<const double> lambda_values,
                                    const QuadratureSpec& qspec, const OptimizerSpec& ospec,
                                    DensityMode mode, std::size_t threads) {
  require_increasing(lambda_values, "lambda", true);
  SweepTable table;
  table.mode = mode;
  table.rows = run_rows(lambda_values.size(), threads, [&](std::size_t i) {
    NoiseParams p = base;
    p.lambda = lambda_values[i];
    return capacity_row(p, lambda_values[i], qspec, ospec, mode);
  });
  return table;
}

}  // namespace hybridcap
