#include "hybridcap/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hybridcap/error.hpp"
#include "hybridcap/noise_params.hpp"

namespace hybridcap {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
using Gauss = boost::math::quadrature::gauss<double, 10>;

struct Panel {
  double a;
  double b;
  double value;
  double error;
};

struct ByError {
  bool operator()(const Panel& x, const Panel& y) const { return x.error < y.error; }
};

double checked(const Integrand& f, double x) {
  const double v = f(x);
  if (!std::isfinite(v)) {
    throw NonFinite("integrand returned a non-finite value at x = " + std::to_string(x));
  }
  return v;
}

// Kronrod nodes at even indices > 0 and zero are Kronrod-only; odd indices are
// shared with the 10-point Gauss rule.
Panel apply_rule(const Integrand& f, double a, double b) {
  const auto& nodes = Kronrod::abscissa();
  const auto& kw = Kronrod::weights();
  const auto& gw = Gauss::weights();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  double kronrod = checked(f, mid) * kw[0];
  double gauss = 0.0;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const double dx = half * nodes[i];
    const double pair = checked(f, mid - dx) + checked(f, mid + dx);
    kronrod += pair * kw[i];
    if (i % 2 == 1) {
      gauss += pair * gw[i / 2];
    }
  }
  kronrod *= half;
  gauss *= half;
  const double err = std::max(std::abs(kronrod - gauss),
                              50.0 * std::numeric_limits<double>::epsilon() * std::abs(kronrod));
  return Panel{a, b, kronrod, err};
}

}  // namespace

void QuadratureSpec::validate() const {
  if (!(rel_tol > 0.0) || !std::isfinite(rel_tol)) {
    throw InvalidParams("rel_tol must be positive and finite");
  }
  if (!(abs_tol > 0.0) || !std::isfinite(abs_tol)) {
    throw InvalidParams("abs_tol must be positive and finite");
  }
  if (max_subdivisions < 1) {
    throw InvalidParams("max_subdivisions must be at least 1");
  }
}

Interval Interval::make(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw InvalidParams("interval requires finite lo < hi, got [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "]");
  }
  return Interval{lo, hi};
}

QuadratureResult integrate(const Integrand& f, Interval iv, const QuadratureSpec& spec) {
  const double bp[] = {iv.lo, iv.hi};
  return integrate(f, std::span<const double>(bp), spec);
}

QuadratureResult integrate(const Integrand& f, std::span<const double> breakpoints,
                           const QuadratureSpec& spec) {
  spec.validate();
  if (breakpoints.size() < 2) {
    throw InvalidParams("integration needs at least two breakpoints");
  }
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    Interval::make(breakpoints[i], breakpoints[i + 1]);
  }

  std::priority_queue<Panel, std::vector<Panel>, ByError> heap;
  double value = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    Panel p = apply_rule(f, breakpoints[i], breakpoints[i + 1]);
    value += p.value;
    error += p.error;
    heap.push(p);
  }

  std::size_t subdivisions = 0;
  auto tolerance = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::abs(value)); };
  while (error > tolerance()) {
    if (subdivisions >= spec.max_subdivisions) {
      throw NonConvergent("quadrature did not reach tolerance within " +
                          std::to_string(spec.max_subdivisions) + " subdivisions (error " +
                          std::to_string(error) + ")");
    }
    const Panel worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) {
      throw NonConvergent("quadrature panel collapsed to machine resolution near x = " +
                          std::to_string(mid));
    }
    heap.pop();
    const Panel left = apply_rule(f, worst.a, mid);
    const Panel right = apply_rule(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++subdivisions;
  }

  // Re-sum to shed drift from the running updates.
  std::vector<Panel> panels;
  panels.reserve(heap.size());
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  double sum = 0.0;
  double comp = 0.0;
  double err_sum = 0.0;
  for (const Panel& p : panels) {
    const double y = p.value - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    err_sum += p.error;
  }
  return QuadratureResult{sum, err_sum, subdivisions};
}

std::vector<double> panel_breakpoints(Interval iv, double max_width, std::size_t max_panels) {
  if (!(max_width > 0.0)) {
    throw InvalidParams("panel width must be positive");
  }
  const double wanted = std::ceil(iv.width() / max_width);
  const auto panels = static_cast<std::size_t>(
      std::clamp(wanted, 1.0, static_cast<double>(std::max<std::size_t>(max_panels, 1))));
  std::vector<double> bp(panels + 1);
  for (std::size_t i = 0; i <= panels; ++i) {
    bp[i] = iv.lo + iv.width() * static_cast<double>(i) / static_cast<double>(panels);
  }
  bp.back() = iv.hi;
  return bp;
}

Interval noise_support(const NoiseParams& params, double tail_mass) {
  params.validate();
  if (!(tail_mass > 0.0 && tail_mass < 1.0)) {
    throw InvalidParams("tail_mass must lie in (0, 1)");
  }
  const boost::math::normal_distribution<double> unit;
  const double k = boost::math::quantile(boost::math::complement(unit, tail_mass / 4.0)) + 1.0;
  const TermRange terms = term_range(params);
  return Interval::make(params.mu + terms.first - k * params.sigma,
                        params.mu + terms.last + k * params.sigma);
}

}  // namespace hybridcap
