#pragma once

#include <optional>
#include <vector>

#include "hybridcap/noise_params.hpp"
#include "hybridcap/quadrature.hpp"

namespace hybridcap {

inline constexpr double kLn2 = 0.693147180559945309417232121458176568;

/// exp(-lambda) lambda^n / n!, evaluated through log-gamma.
double poisson_pmf(int n, double lambda);
double poisson_log_pmf(int n, double lambda);

double gaussian_pdf(double t, double mu, double sigma);
double gaussian_log_pdf(double t, double mu, double sigma);

/// Truncated Poisson-Gaussian mixture with the Poisson log-weights computed
/// once. Evaluation is a log-sum-exp over the retained terms.
class HybridNoise {
 public:
  explicit HybridNoise(const NoiseParams& params);

  const NoiseParams& params() const { return params_; }
  const TermRange& terms() const { return terms_; }

  /// Log-weight of Poisson index `terms().first + i`.
  const std::vector<double>& log_weights() const { return log_weights_; }

  /// Exact total mass of the truncated mixture over the real line.
  double mass() const { return mass_; }

  double log_pdf(double z) const;
  double pdf(double z) const;

  /// -f log2 f with 0 log 0 = 0.
  double entropy_integrand(double z) const;

  /// Breakpoints over `iv` with panels no wider than sigma.
  std::vector<double> breakpoints(Interval iv) const;

 private:
  NoiseParams params_;
  TermRange terms_;
  std::vector<double> log_weights_;
  double max_log_weight_;
  double log_norm_;
  double mass_;
};

double hybrid_log_pdf(double z, const NoiseParams& params);
double hybrid_pdf(double z, const NoiseParams& params);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Closed-form mean lambda + mu and variance lambda + sigma^2 of the
/// untruncated model. Throws UnsupportedMode when the n = 0 term is excluded.
Moments hybrid_moments(const NoiseParams& params);

/// Raw moment of order k in {1, 2}: integral of z^k f_Z(z) over the noise
/// support. Not renormalized, so in the n >= 1 mode the result carries the
/// 1 - exp(-lambda) mass factor.
double moment_by_quadrature(const NoiseParams& params, int k, const QuadratureSpec& spec = {});

/// Differential entropy h(Z) in bits.
double noise_entropy(const NoiseParams& params, const QuadratureSpec& spec = {});

/// A density sampled on an increasing grid.
struct TabulatedDensity {
  Interval support;
  std::vector<double> abscissae;
  std::vector<double> densities;
  double total_mass = 0.0;
};

/// Trapezoidal integral of `values` over `abscissae`.
double trapezoid(const std::vector<double>& abscissae, const std::vector<double>& values);

struct NoiseTable {
  TabulatedDensity density;
  /// -f_Z log2 f_Z at each abscissa.
  std::vector<double> entropy_integrand;
};

/// f_Z and its entropy integrand on `n_points` evenly spaced abscissae over
/// `grid` (default: noise_support(params)).
NoiseTable tabulate_noise(const NoiseParams& params, int n_points,
                          std::optional<Interval> grid = std::nullopt);

}  // namespace hybridcap
