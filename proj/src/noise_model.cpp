#include "hybridcap/noise_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "hybridcap/error.hpp"

namespace hybridcap {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// exp(-60) relative to the largest term is far below double resolution even
// after summing thousands of such terms.
constexpr double kLogCutoff = 60.0;

double log_gaussian_norm(double sigma) { return -std::log(sigma * std::sqrt(2.0 * std::numbers::pi)); }


}  // namespace

void NoiseParams::validate() const {
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw InvalidParams("lambda must be finite and >= 0, got " + std::to_string(lambda));
  }
  if (!std::isfinite(mu)) {
    throw InvalidParams("mu must be finite");
  }
  if (!std::isfinite(sigma) || !(sigma > 0.0)) {
    throw InvalidParams("sigma must be finite and > 0, got " + std::to_string(sigma));
  }
  if (const auto* fixed = std::get_if<FixedTerms>(&trunc.mode)) {
    if (fixed->n < 1) {
      throw InvalidParams("trunc-n must be >= 1");
    }
  } else {
    const double eps = std::get<TailBound>(trunc.mode).epsilon;
    if (!(eps > 0.0 && eps < 1.0)) {
      throw InvalidParams("tail-bound epsilon must lie in (0, 1)");
    }
  }
}

TermRange term_range(const NoiseParams& params) {
  params.validate();
  const int first = params.trunc.include_zero_term ? 0 : 1;
  if (const auto* fixed = std::get_if<FixedTerms>(&params.trunc.mode)) {
    return TermRange{first, fixed->n};
  }
  const double eps = std::get<TailBound>(params.trunc.mode).epsilon;
  // P(N > n) = P(n + 1, lambda), the regularized lower incomplete gamma.
  int last = first;
  if (params.lambda > 0.0) {
    while (boost::math::gamma_p(static_cast<double>(last) + 1.0, params.lambda) >= eps) {
      ++last;
    }
  }
  return TermRange{first, std::max(last, first)};
}

double poisson_log_pmf(int n, double lambda) {
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw InvalidParams("lambda must be finite and >= 0");
  }
  if (n < 0) {
    throw InvalidParams("Poisson index must be >= 0");
  }
  if (lambda == 0.0) {
    return n == 0 ? 0.0 : kNegInf;
  }
  return -lambda + n * std::log(lambda) - boost::math::lgamma(static_cast<double>(n) + 1.0);
}

double poisson_pmf(int n, double lambda) { return std::exp(poisson_log_pmf(n, lambda)); }

double gaussian_log_pdf(double t, double mu, double sigma) {
  if (!std::isfinite(sigma) || !(sigma > 0.0)) {
    throw InvalidParams("sigma must be finite and > 0");
  }
  const double u = (t - mu) / sigma;
  return log_gaussian_norm(sigma) - 0.5 * u * u;
}

double gaussian_pdf(double t, double mu, double sigma) {
  if (!std::isfinite(sigma) || !(sigma > 0.0)) {
    throw InvalidParams("sigma must be finite and > 0");
  }
  const double u = (t - mu) / sigma;
  return std::exp(-0.5 * u * u) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

HybridNoise::HybridNoise(const NoiseParams& params)
    : params_(params),
      terms_(term_range(params)),
      max_log_weight_(kNegInf),
      log_norm_(log_gaussian_norm(params.sigma)),
      mass_(0.0) {
  log_weights_.reserve(static_cast<std::size_t>(terms_.count()));
  for (int n = terms_.first; n <= terms_.last; ++n) {
    const double lw = poisson_log_pmf(n, params_.lambda);
    log_weights_.push_back(lw);
    max_log_weight_ = std::max(max_log_weight_, lw);
    mass_ += std::exp(lw);
  }
}

double HybridNoise::log_pdf(double z) const {
  if (max_log_weight_ == kNegInf) {
    return kNegInf;
  }
  const double inv_sigma = 1.0 / params_.sigma;
  double peak = kNegInf;
  for (std::size_t i = 0; i < log_weights_.size(); ++i) {
    const double u = (z - params_.mu - (terms_.first + static_cast<double>(i))) * inv_sigma;
    peak = std::max(peak, log_weights_[i] - 0.5 * u * u);
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < log_weights_.size(); ++i) {
    if (log_weights_[i] < peak - kLogCutoff) {
      continue;
    }
    const double u = (z - params_.mu - (terms_.first + static_cast<double>(i))) * inv_sigma;
    const double term = log_weights_[i] - 0.5 * u * u;
    if (term >= peak - kLogCutoff) {
      sum += std::exp(term - peak);
    }
  }
  return peak + std::log(sum) + log_norm_;
}

double HybridNoise::pdf(double z) const { return std::exp(log_pdf(z)); }

double HybridNoise::entropy_integrand(double z) const {
  const double lf = log_pdf(z);
  if (lf == kNegInf) {
    return 0.0;
  }
  const double f = std::exp(lf);
  return f == 0.0 ? 0.0 : -f * lf / kLn2;
}

std::vector<double> HybridNoise::breakpoints(Interval iv) const {
  return panel_breakpoints(iv, params_.sigma);
}

double hybrid_log_pdf(double z, const NoiseParams& params) { return HybridNoise(params).log_pdf(z); }

double hybrid_pdf(double z, const NoiseParams& params) { return HybridNoise(params).pdf(z); }

Moments hybrid_moments(const NoiseParams& params) {
  params.validate();
  if (!params.trunc.include_zero_term) {
    throw UnsupportedMode("closed-form moments need the n = 0 term; use moment_by_quadrature");
  }
  return Moments{params.lambda + params.mu, params.lambda + params.sigma * params.sigma};
}

double moment_by_quadrature(const NoiseParams& params, int k, const QuadratureSpec& spec) {
  if (k != 1 && k != 2) {
    throw InvalidParams("moment order must be 1 or 2, got " + std::to_string(k));
  }
  const HybridNoise noise(params);
  const Interval support = noise_support(params);
  const auto bp = noise.breakpoints(support);
  return integrate(
             [&](double z) {
               const double f = noise.pdf(z);
               return k == 1 ? z * f : z * z * f;
             },
             bp, spec)
      .value;
}

double noise_entropy(const NoiseParams& params, const QuadratureSpec& spec) {
  const HybridNoise noise(params);
  const auto bp = noise.breakpoints(noise_support(params));
  return integrate([&](double z) { return noise.entropy_integrand(z); }, bp, spec).value;
}

double trapezoid(const std::vector<double>& abscissae, const std::vector<double>& values) {
  if (abscissae.size() != values.size()) {
    throw InvalidParams("trapezoid: abscissae and values differ in length");
  }
  double total = 0.0;
  for (std::size_t i = 1; i < abscissae.size(); ++i) {
    total += 0.5 * (values[i] + values[i - 1]) * (abscissae[i] - abscissae[i - 1]);
  }
  return total;
}

NoiseTable tabulate_noise(const NoiseParams& params, int n_points, std::optional<Interval> grid) {
  if (n_points < 2) {
    throw InvalidParams("points must be >= 2, got " + std::to_string(n_points));
  }
  const HybridNoise noise(params);
  const Interval iv = grid ? Interval::make(grid->lo, grid->hi) : noise_support(params);

  NoiseTable table;
  table.density.support = iv;
  table.density.abscissae.resize(static_cast<std::size_t>(n_points));
  table.density.densities.resize(static_cast<std::size_t>(n_points));
  table.entropy_integrand.resize(static_cast<std::size_t>(n_points));
  for (int i = 0; i < n_points; ++i) {
    const double z = i + 1 == n_points ? iv.hi : iv.lo + iv.width() * i / (n_points - 1);
    const double lf = noise.log_pdf(z);
    const double f = std::exp(lf);
    const auto idx = static_cast<std::size_t>(i);
    table.density.abscissae[idx] = z;
    table.density.densities[idx] = f;
    table.entropy_integrand[idx] = f == 0.0 ? 0.0 : -f * lf / kLn2;
  }
  table.density.total_mass = trapezoid(table.density.abscissae, table.density.densities);
  return table;
}

}  // namespace hybridcap
