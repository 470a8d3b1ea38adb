#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hybridcap {

struct NoiseParams;

/// Tolerances for adaptive integration. Converged when the summed panel error
/// is at most max(abs_tol, rel_tol * |value|).
struct QuadratureSpec {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  std::size_t max_subdivisions = std::size_t{1} << 16;

  void validate() const;
};

/// Closed finite interval [lo, hi] with lo < hi.
struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  /// Throws InvalidParams unless both ends are finite and lo < hi.
  static Interval make(double lo, double hi);

  double width() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool contains(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }
};

struct QuadratureResult {
  double value = 0.0;
  double err_estimate = 0.0;
  std::size_t subdivisions = 0;
};

using Integrand = std::function<double(double)>;

inline constexpr double kDefaultTailMass = 1e-12;

/// Globally adaptive 21-point Gauss-Kronrod integration over `iv`.
///
/// The panel with the largest |K21 - G10| discrepancy is bisected until the
/// summed discrepancy meets the tolerance. Throws NonConvergent when
/// `spec.max_subdivisions` bisections were not enough and NonFinite when `f`
/// returns NaN or infinity.
QuadratureResult integrate(const Integrand& f, Interval iv, const QuadratureSpec& spec = {});

/// Same as above, starting from the panels delimited by `breakpoints`
/// (strictly increasing, at least two entries). Integrands with features much
/// narrower than the whole range need an initial partition, otherwise the
/// first Kronrod panel can step over them entirely.
QuadratureResult integrate(const Integrand& f, std::span<const double> breakpoints,
                           const QuadratureSpec& spec = {});

/// Evenly spaced breakpoints over `iv` with spacing at most `max_width`,
/// using between 1 and `max_panels` panels.
std::vector<double> panel_breakpoints(Interval iv, double max_width, std::size_t max_panels = 4096);

/// Finite integration range for the hybrid noise density.
///
/// Every included mixture component n contributes a Gaussian centred at
/// mu + n; the interval spans the lowest and highest included components
/// widened by k*sigma, where the two-sided Gaussian tail beyond k*sigma is
/// below tail_mass / 2 plus one extra sigma for the slower-decaying entropy
/// integrand -f log f.
Interval noise_support(const NoiseParams& params, double tail_mass = kDefaultTailMass);

}  // namespace hybridcap
