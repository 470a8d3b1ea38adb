#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hybridcap/noise_params.hpp"
#include "hybridcap/quadrature.hpp"
#include "hybridcap/signal_model.hpp"

namespace hybridcap {

/// Coarse grid over [0, 2*pi] followed by golden-section refinement.
struct OptimizerSpec {
  std::size_t grid_points = 256;
  double refine_tol = 1e-6;
  std::size_t max_refine_iters = 200;

  void validate() const;
};

struct MiPoint {
  double mu_x = 0.0;
  double mi_bits = 0.0;
};

struct CapacityResult {
  DensityMode mode = DensityMode::kPaperLiteral;
  double mu_x_star = 0.0;
  double capacity_bits = 0.0;
  /// Every evaluation, grid first, then refinement probes in visiting order.
  std::vector<MiPoint> mi_curve;
  std::size_t evaluations = 0;

  // Diagnostics.
  double grid_mu_x_star = 0.0;
  double grid_capacity_bits = 0.0;
  double grid_cell = 0.0;
  std::size_t refine_iterations = 0;
  /// The refinement settled on an interior bracket edge, so the MI curve is
  /// not unimodal around the grid maximum.
  bool non_unimodal_warning = false;
};

/// I(X;Y) = h(Y) - h(Z) in bits.
double mutual_information(const TransmitEstimate& est, const NoiseParams& params,
                          const QuadratureSpec& spec, DensityMode mode);

/// Maximizes I(X;Y) over mu_x in [0, 2*pi]. Ties go to the smallest mu_x.
/// In normalized mode the MI does not depend on mu_x; the value at mu_x = 0
/// is taken as that constant.
CapacityResult channel_capacity(const NoiseParams& params, const QuadratureSpec& qspec,
                                const OptimizerSpec& ospec, DensityMode mode);

/// mu_Y / sigma_Z. sigma_Z comes from the closed-form moments when the n = 0
/// term is kept, otherwise from quadrature moments of the renormalized
/// density.
double snr(const TransmitEstimate& est, const NoiseParams& params, const QuadratureSpec& spec = {});

struct SweepRow {
  double x = 0.0;
  /// MI for an MI sweep, capacity for a capacity sweep.
  double bits = 0.0;
  double snr = 0.0;
  double sigma = 0.0;
  double lambda = 0.0;
  double mu_x_star = 0.0;
  /// Normalized-mode row at mu_x = 0, filled with the mu_x -> 0+ limit.
  bool degenerate = false;
};

struct SweepTable {
  DensityMode mode = DensityMode::kPaperLiteral;
  std::vector<SweepRow> rows;
};

/// MI on a uniform grid of `n_points` values of mu_x spanning [0, 2*pi].
SweepTable sweep_mi_vs_mux(const NoiseParams& params, const QuadratureSpec& qspec, int n_points,
                           DensityMode mode);

/// One capacity row per sigma (positive, strictly increasing). SNR is
/// evaluated at each row's optimal mu_x. Rows are independent and may run on
/// up to `threads` threads; the table is identical for any thread count.
SweepTable sweep_capacity_vs_sigma(const NoiseParams& base, std::span<const double> sigma_values,
                                   const QuadratureSpec& qspec, const OptimizerSpec& ospec,
                                   DensityMode mode, std::size_t threads = 1);

/// Same, varying lambda (nonnegative, strictly increasing) at fixed sigma.
SweepTable sweep_capacity_vs_lambda(const NoiseParams& base, std::span<const double> lambda_values,
                                    const QuadratureSpec& qspec, const OptimizerSpec& ospec,
                                    DensityMode mode, std::size_t threads = 1);

}  // namespace hybridcap
