#pragma once

#include <string_view>

#include "hybridcap/noise_model.hpp"
#include "hybridcap/noise_params.hpp"
#include "hybridcap/quadrature.hpp"

namespace hybridcap {

/// Point estimate of the transmit signal, restricted to [0, 2*pi].
struct TransmitEstimate {
  double mu_x = 3.14159265358979323846;

  void validate() const;
};

/// How the received density treats the mu_x prefactor.
enum class DensityMode {
  /// f_Y(y) = mu_x * integral_0^{2pi} f_Z(y - t) dt, total mass 2*pi*mu_x*mass(f_Z).
  kPaperLiteral,
  /// The same curve divided by its total mass; independent of mu_x.
  kNormalized,
};

std::string_view to_string(DensityMode mode);
/// Accepts "paper-literal" and "normalized"; throws InvalidParams otherwise.
DensityMode parse_density_mode(std::string_view text);

/// Received-signal density for fixed noise parameters.
///
/// The window integral over t in [0, 2*pi] is evaluated in closed form as a
/// Poisson-weighted sum of Gaussian CDF differences.
class ReceivedDensity {
 public:
  explicit ReceivedDensity(const NoiseParams& params);

  const HybridNoise& noise() const { return noise_; }

  /// integral_0^{2pi} f_Z(y - t) dt.
  double window(double y) const;

  /// Mass of window() over the real line: 2*pi*mass(f_Z).
  double window_mass() const { return window_mass_; }

  double literal(double y, double mu_x) const { return mu_x * window(y); }
  double normalized(double y) const { return window(y) / window_mass_; }

  /// Integration range: the noise support stretched by 2*pi to the right.
  Interval support() const { return support_; }
  std::vector<double> breakpoints() const;

  /// h(Y) in bits for the paper-literal curve (0 at mu_x = 0).
  double literal_entropy(double mu_x, const QuadratureSpec& spec) const;
  /// h(Y) in bits for the normalized density.
  double normalized_entropy(const QuadratureSpec& spec) const;
  /// Mean of the normalized density.
  double mean(const QuadratureSpec& spec) const;

 private:
  HybridNoise noise_;
  double window_mass_;
  Interval support_;
};

/// f_Y(y). Throws DegenerateInput for the normalized mode at mu_x = 0.
double received_pdf(double y, const TransmitEstimate& est, const NoiseParams& params,
                    DensityMode mode);

/// h(Y) = -integral f_Y log2 f_Y over [support(f_Z).lo, support(f_Z).hi + 2*pi].
double received_entropy(const TransmitEstimate& est, const NoiseParams& params,
                        const QuadratureSpec& spec, DensityMode mode);

/// mu_Y as the mean of the normalized received density. Throws
/// DegenerateInput at mu_x = 0.
double received_mean(const TransmitEstimate& est, const NoiseParams& params,
                     const QuadratureSpec& spec = {});

/// Driven two-level system: Rabi frequency, generalized Rabi frequency, time.
struct RabiConfig {
  double omega = 1.0;
  double omega_g = 1.0;
  double t = 0.0;

  /// Requires 0 < omega <= omega_g and t >= 0.
  void validate() const;
};

struct BlochAngles {
  double theta = 0.0;
  double phi = 0.0;
};

/// Singularity tolerance on sin(omega_g t / 2) and on 1 - omega / omega_g.
inline constexpr double kBlochSingularTol = 1e-12;

/// theta = 2 arccos((omega / omega_g) sin(omega_g t / 2)), always in [0, 2*pi].
double bloch_theta(const RabiConfig& cfg);

/// phi = psi(theta), the composite arcsin form written in terms of theta.
/// Throws Singularity when sqrt(1 - (omega/omega_g)^2) sin^2(omega_g t / 2)
/// vanishes and OutOfDomain when the arcsin argument leaves [-1, 1].
double bloch_phi(const RabiConfig& cfg);

BlochAngles bloch_angles(const RabiConfig& cfg);

/// Tunnelling splitting delta and energy difference epsilon; not both zero.
struct WorkingPoint {
  double delta = 0.0;
  double epsilon = 1.0;
};

/// Four-quadrant arctan(delta / epsilon) in (-pi, pi].
double working_point(const WorkingPoint& wp);

}  // namespace hybridcap
