#include "hybridcap/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hybridcap/error.hpp"

namespace hybridcap {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kLogCutoff = 60.0;

// Phi(a) - Phi(b) for a >= b, picking the erfc branch that avoids cancellation.
double normal_cdf_diff(double a, double b) {
  constexpr double r = 0.70710678118654752440;
  if (b >= 0.0) {
    return 0.5 * (std::erfc(b * r) - std::erfc(a * r));
  }
  if (a <= 0.0) {
    return 0.5 * (std::erfc(-a * r) - std::erfc(-b * r));
  }
  return 1.0 - 0.5 * std::erfc(a * r) - 0.5 * std::erfc(-b * r);
}

double neg_f_log2_f(double f) { return f > 0.0 ? -f * std::log2(f) : 0.0; }

}  // namespace

void TransmitEstimate::validate() const {
  if (!std::isfinite(mu_x) || mu_x < 0.0 || mu_x > kTwoPi) {
    throw InvalidParams("mu-x must lie in [0, 2*pi], got " + std::to_string(mu_x));
  }
}

std::string_view to_string(DensityMode mode) {
  return mode == DensityMode::kNormalized ? "normalized" : "paper-literal";
}

DensityMode parse_density_mode(std::string_view text) {
  if (text == "paper-literal") {
    return DensityMode::kPaperLiteral;
  }
  if (text == "normalized") {
    return DensityMode::kNormalized;
  }
  throw InvalidParams("mode must be 'paper-literal' or 'normalized', got '" + std::string(text) +
                      "'");
}

ReceivedDensity::ReceivedDensity(const NoiseParams& params)
    : noise_(params), window_mass_(kTwoPi * noise_.mass()), support_() {
  const Interval z = noise_support(params);
  support_ = Interval::make(z.lo, z.hi + kTwoPi);
}

double ReceivedDensity::window(double y) const {
  const NoiseParams& p = noise_.params();
  const auto& lw = noise_.log_weights();
  const double top = *std::max_element(lw.begin(), lw.end());
  const double inv_sigma = 1.0 / p.sigma;
  double sum = 0.0;
  for (std::size_t i = 0; i < lw.size(); ++i) {
    if (lw[i] < top - kLogCutoff) {
      continue;
    }
    const double centre = p.mu + noise_.terms().first + static_cast<double>(i);
    const double upper = (y - centre) * inv_sigma;
    const double lower = (y - kTwoPi - centre) * inv_sigma;
    sum += std::exp(lw[i]) * normal_cdf_diff(upper, lower);
  }
  return sum;
}

std::vector<double> ReceivedDensity::breakpoints() const {
  return panel_breakpoints(support_, noise_.params().sigma);
}

double ReceivedDensity::literal_entropy(double mu_x, const QuadratureSpec& spec) const {
  if (mu_x == 0.0) {
    return 0.0;
  }
  const auto bp = breakpoints();
  return integrate([&](double y) { return neg_f_log2_f(literal(y, mu_x)); }, bp, spec).value;
}

double ReceivedDensity::normalized_entropy(const QuadratureSpec& spec) const {
  const auto bp = breakpoints();
  return integrate([&](double y) { return neg_f_log2_f(normalized(y)); }, bp, spec).value;
}

double ReceivedDensity::mean(const QuadratureSpec& spec) const {
  const auto bp = breakpoints();
  const double first = integrate([&](double y) { return y * window(y); }, bp, spec).value;
  const double mass = integrate([&](double y) { return window(y); }, bp, spec).value;
  if (!(mass > 0.0)) {
    throw DegenerateInput("received density has zero mass");
  }
  return first / mass;
}

double received_pdf(double y, const TransmitEstimate& est, const NoiseParams& params,
                    DensityMode mode) {
  est.validate();
  const ReceivedDensity density(params);
  if (mode == DensityMode::kPaperLiteral) {
    return density.literal(y, est.mu_x);
  }
  if (est.mu_x == 0.0) {
    throw DegenerateInput("normalized received density is undefined at mu-x = 0");
  }
  return density.normalized(y);
}

double received_entropy(const TransmitEstimate& est, const NoiseParams& params,
                        const QuadratureSpec& spec, DensityMode mode) {
  est.validate();
  const ReceivedDensity density(params);
  if (mode == DensityMode::kPaperLiteral) {
    return density.literal_entropy(est.mu_x, spec);
  }
  if (est.mu_x == 0.0) {
    throw DegenerateInput("normalized received entropy is undefined at mu-x = 0");
  }
  return density.normalized_entropy(spec);
}

double received_mean(const TransmitEstimate& est, const NoiseParams& params,
                     const QuadratureSpec& spec) {
  est.validate();
  if (est.mu_x == 0.0) {
    throw DegenerateInput("received mean is undefined at mu-x = 0");
  }
  return ReceivedDensity(params).mean(spec);
}

void RabiConfig::validate() const {
  if (!std::isfinite(omega) || !std::isfinite(omega_g) || !std::isfinite(t)) {
    throw InvalidParams("Rabi configuration must be finite");
  }
  if (!(omega > 0.0) || omega > omega_g) {
    throw InvalidParams("Rabi configuration requires 0 < omega <= omega_g");
  }
  if (t < 0.0) {
    throw InvalidParams("transition time must be >= 0");
  }
}

double bloch_theta(const RabiConfig& cfg) {
  cfg.validate();
  const double arg = (cfg.omega / cfg.omega_g) * std::sin(0.5 * cfg.omega_g * cfg.t);
  return 2.0 * std::acos(std::clamp(arg, -1.0, 1.0));
}

double bloch_phi(const RabiConfig& cfg) {
  cfg.validate();
  const double ratio = cfg.omega / cfg.omega_g;
  if (std::abs(std::sin(0.5 * cfg.omega_g * cfg.t)) <= kBlochSingularTol ||
      1.0 - ratio <= kBlochSingularTol) {
    throw Singularity("phi denominator sqrt(1 - (omega/omega_g)^2) sin^2(omega_g t / 2) vanishes");
  }
  const double half_cos = std::cos(0.5 * bloch_theta(cfg));
  const double scaled = half_cos * half_cos / (ratio * ratio);

  double radicand = 1.0 - scaled;
  if (radicand < 0.0) {
    if (radicand < -kBlochSingularTol) {
      throw OutOfDomain("phi numerator radicand is negative: " + std::to_string(radicand));
    }
    radicand = 0.0;
  }
  const double denom = std::sqrt(1.0 - ratio * ratio) * scaled;
  if (denom == 0.0) {
    throw Singularity("phi denominator vanishes");
  }
  double arg = std::sqrt(radicand) / denom;
  if (std::abs(arg) > 1.0) {
    if (std::abs(arg) > 1.0 + kBlochSingularTol) {
      throw OutOfDomain("phi arcsin argument " + std::to_string(arg) + " lies outside [-1, 1]");
    }
    arg = std::clamp(arg, -1.0, 1.0);
  }
  return -std::asin(arg);
}

BlochAngles bloch_angles(const RabiConfig& cfg) { return BlochAngles{bloch_theta(cfg), bloch_phi(cfg)}; }

double working_point(const WorkingPoint& wp) {
  if (!std::isfinite(wp.delta) || !std::isfinite(wp.epsilon)) {
    throw InvalidParams("working point must be finite");
  }
  if (wp.delta == 0.0 && wp.epsilon == 0.0) {
    throw InvalidParams("working point needs delta or epsilon nonzero");
  }
  const double angle = std::atan2(wp.delta, wp.epsilon);
  return angle <= -std::numbers::pi ? std::numbers::pi : angle;
}

}  // namespace hybridcap
