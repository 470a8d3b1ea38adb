#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "hybridcap/capacity.hpp"
#include "hybridcap/error.hpp"
#include "hybridcap/mc_oracle.hpp"
#include "hybridcap/noise_model.hpp"
#include "oracles.hpp"

using namespace hybridcap;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

NoiseParams with(double lambda, double mu, double sigma) {
  NoiseParams p;
  p.lambda = lambda;
  p.mu = mu;
  p.sigma = sigma;
  return p;
}

}  // namespace

TEST_CASE("mutual_information: definitions") {
  const QuadratureSpec spec;
  const NoiseParams p = with(5.0, 0.0, 15.0);
  CHECK(mutual_information(TransmitEstimate{0.0}, p, spec, DensityMode::kPaperLiteral) == -noise_entropy(p, spec));
  CHECK_THROWS_AS(mutual_information(TransmitEstimate{0.0}, p, spec, DensityMode::kNormalized), DegenerateInput);
}

TEST_CASE("mutual_information: uniform window against vanishing noise") {
  const NoiseParams p = with(1e-12, 0.0, 0.05);
  const double mi = mutual_information(TransmitEstimate{1.0}, p, QuadratureSpec{}, DensityMode::kNormalized);
  const double closed_form = std::log2(kTwoPi) - testing::gaussian_entropy_bits(0.05);
  CHECK(std::abs(mi - closed_form) < 0.05);
  CHECK(std::abs(closed_form - 4.926328639) < 1e-8);
}

TEST_CASE("mutual_information: reference parameters against Monte-Carlo histograms") {
  const NoiseParams p = with(5.0, 0.0, 15.0);
  const double mi_norm = mutual_information(TransmitEstimate{kPi}, p, QuadratureSpec{}, DensityMode::kNormalized);
  const double mi_lit = mutual_information(TransmitEstimate{kPi}, p, QuadratureSpec{}, DensityMode::kPaperLiteral);
  CHECK(std::abs(mi_norm - 0.0102449052011) < 1e-9);
  CHECK(std::abs(mi_lit - 27.1346487347) < 1e-8);

  // Y = U[0, 2 pi] + Z sampled directly; common histogram grid for Y and Z.
  const std::size_t n = 2'000'000;
  std::vector<double> z = sample_hybrid(p, SampleSpec{n, 17});
  std::vector<double> y = z;
  auto engine = substream_engine(17, 1u << 20);
  std::uniform_real_distribution<double> window(0.0, kTwoPi);
  for (double& v : y) {
    v += window(engine);
  }
  const Interval range = Interval::make(-130.0, 236.0);
  const double hy = empirical_entropy(y, HistogramSpec{1024, range}).bits;
  const double hz = empirical_entropy(z, HistogramSpec{1024, range}).bits;
  CHECK(std::abs((hy - hz) - mi_norm) < 0.004);
}

TEST_CASE("channel_capacity: normalized mode is flat in mu_x") {
  const NoiseParams p = with(5.0, 0.0, 15.0);
  OptimizerSpec ospec;
  ospec.grid_points = 32;
  const CapacityResult r = channel_capacity(p, QuadratureSpec{}, ospec, DensityMode::kNormalized);
  const double flat = mutual_information(TransmitEstimate{1.0}, p, QuadratureSpec{}, DensityMode::kNormalized);
  CHECK(r.capacity_bits == flat);
  CHECK(r.mu_x_star == 0.0);
  CHECK(r.grid_mu_x_star == 0.0);
  for (const MiPoint& pt : r.mi_curve) {
    CHECK(pt.mi_bits == flat);
  }
  CHECK_FALSE(r.non_unimodal_warning);
}

TEST_CASE("channel_capacity: paper-literal optimum matches the stationary point") {
  // I(mu) = c mu [h_n - log2(c mu)] - h_Z with c = 2 pi mass(f_Z) is concave in
  // mu, maximal at c mu* = 2^h_n / e with value 2^h_n / (e ln 2) - h_Z.
  const NoiseParams p = with(5.0, 0.0, 15.0);
  const QuadratureSpec qspec;
  const CapacityResult r = channel_capacity(p, qspec, OptimizerSpec{}, DensityMode::kPaperLiteral);

  const double h_n = received_entropy(TransmitEstimate{1.0}, p, qspec, DensityMode::kNormalized);
  const double h_z = noise_entropy(p, qspec);
  const double c = kTwoPi * HybridNoise(p).mass();
  const double mu_star = std::exp2(h_n) / (std::numbers::e * c);
  const double cap = std::exp2(h_n) / (std::numbers::e * std::numbers::ln2) - h_z;
  CHECK(std::abs(r.mu_x_star - mu_star) < 1e-5);
  CHECK(std::abs(r.capacity_bits - cap) < 1e-8);

  CHECK(std::abs(r.mu_x_star - 3.69581900376) < 1e-6);
  CHECK(std::abs(r.capacity_bits - 27.5317249668) < 1e-8);
  CHECK(std::abs(r.mu_x_star - r.grid_mu_x_star) <= r.grid_cell);
  CHECK(r.capacity_bits >= r.grid_capacity_bits);
  CHECK_FALSE(r.non_unimodal_warning);
  CHECK(r.evaluations == r.mi_curve.size());
  for (const MiPoint& pt : r.mi_curve) {
    CHECK(r.capacity_bits >= pt.mi_bits - 1e-9);
  }
}

TEST_CASE("channel_capacity: dominance and determinism") {
  const NoiseParams p = with(3.0, 1.0, 6.0);
  OptimizerSpec ospec;
  ospec.grid_points = 40;
  for (DensityMode mode : {DensityMode::kPaperLiteral, DensityMode::kNormalized}) {
    const CapacityResult a = channel_capacity(p, QuadratureSpec{}, ospec, mode);
    const CapacityResult b = channel_capacity(p, QuadratureSpec{}, ospec, mode);
    CHECK(a.capacity_bits == b.capacity_bits);
    CHECK(a.mu_x_star == b.mu_x_star);
    CHECK(a.mi_curve.size() == b.mi_curve.size());
    CHECK(a.capacity_bits >= mutual_information(TransmitEstimate{kPi}, p, QuadratureSpec{}, mode));
    for (double mu_x : {0.5, 1.7, 2.9, 4.4, 6.1}) {
      CHECK(a.capacity_bits >= mutual_information(TransmitEstimate{mu_x}, p, QuadratureSpec{}, mode) - 1e-9);
    }
  }
}

TEST_CASE("channel_capacity: optimum beyond 2 pi stays at the boundary") {
  // Wide noise pushes the unconstrained optimum past 2 pi.
  const NoiseParams p = with(5.0, 0.0, 40.0);
  OptimizerSpec ospec;
  ospec.grid_points = 16;
  const CapacityResult r = channel_capacity(p, QuadratureSpec{}, ospec, DensityMode::kPaperLiteral);
  CHECK(r.mu_x_star == doctest::Approx(kTwoPi).epsilon(1e-6));
  CHECK(r.capacity_bits >= r.grid_capacity_bits);
}

TEST_CASE("channel_capacity: invalid optimizer spec") {
  OptimizerSpec bad;
  bad.grid_points = 4;
  CHECK_THROWS_AS(channel_capacity(NoiseParams{}, QuadratureSpec{}, bad, DensityMode::kNormalized), InvalidParams);
  bad = OptimizerSpec{};
  bad.refine_tol = 0.0;
  CHECK_THROWS_AS(channel_capacity(NoiseParams{}, QuadratureSpec{}, bad, DensityMode::kNormalized), InvalidParams);
}

TEST_CASE("snr") {
  const QuadratureSpec spec;
  const double reference = snr(TransmitEstimate{kPi}, with(5.0, 0.0, 15.0), spec);
  CHECK(std::abs(reference - (kPi + 5.0) / std::sqrt(230.0)) < 1e-6);
  CHECK(std::abs(reference - 0.5368) < 1e-4);
  CHECK(std::abs(snr(TransmitEstimate{kPi}, with(0.0, 0.0, 15.0), spec) - kPi / 15.0) < 1e-4);
  double prev = std::numeric_limits<double>::infinity();
  for (double sigma : {1.0, 2.0, 5.0, 10.0, 20.0, 40.0}) {
    const double s = snr(TransmitEstimate{1.0}, with(5.0, 0.0, sigma), spec);
    CHECK(s < prev);
    prev = s;
  }
  CHECK_THROWS_AS(snr(TransmitEstimate{0.0}, with(5.0, 0.0, 15.0), spec), DegenerateInput);

  // n >= 1 mode: moments of the renormalized density.
  NoiseParams exact = with(5.0, 0.0, 15.0);
  exact.trunc.include_zero_term = false;
  const double m = 1.0 - std::exp(-5.0);
  const double mean = 5.0 / m;
  const double var = 225.0 + (5.0 + 25.0) / m - mean * mean;
  const double mean_y = kPi + mean;
  CHECK(std::abs(snr(TransmitEstimate{1.0}, exact, spec) - mean_y / std::sqrt(var)) < 1e-6);
}

TEST_CASE("sweep_mi_vs_mux") {
  const NoiseParams p = with(5.0, 0.0, 15.0);
  const SweepTable flat = sweep_mi_vs_mux(p, QuadratureSpec{}, 3, DensityMode::kNormalized);
  REQUIRE(flat.rows.size() == 3);
  CHECK(flat.rows[0].bits == flat.rows[1].bits);
  CHECK(flat.rows[1].bits == flat.rows[2].bits);
  CHECK(flat.rows[0].degenerate);
  CHECK_FALSE(flat.rows[1].degenerate);

  const SweepTable curve = sweep_mi_vs_mux(p, QuadratureSpec{}, 65, DensityMode::kPaperLiteral);
  REQUIRE(curve.rows.size() == 65);
  CHECK(curve.rows.front().x == 0.0);
  CHECK(curve.rows.back().x == kTwoPi);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < curve.rows.size(); ++i) {
    CHECK(std::isfinite(curve.rows[i].bits));
    CHECK(std::isfinite(curve.rows[i].snr));
    if (i > 0) {
      CHECK(curve.rows[i].x > curve.rows[i - 1].x);
    }
    best = std::max(best, curve.rows[i].bits);
  }
  OptimizerSpec ospec;
  ospec.grid_points = 65;
  const CapacityResult r = channel_capacity(p, QuadratureSpec{}, ospec, DensityMode::kPaperLiteral);
  CHECK(best == r.grid_capacity_bits);
  CHECK(r.capacity_bits >= best - 1e-9);

  CHECK_THROWS_AS(sweep_mi_vs_mux(p, QuadratureSpec{}, 1, DensityMode::kPaperLiteral), InvalidParams);
}

TEST_CASE("sweep_capacity_vs_sigma: noise-power and SNR trends") {
  const std::vector<double> sigmas{5.0, 10.0, 15.0, 20.0, 25.0};
  const NoiseParams base = with(5.0, 0.0, 15.0);
  const SweepTable t = sweep_capacity_vs_sigma(base, sigmas, QuadratureSpec{}, OptimizerSpec{}, DensityMode::kNormalized);
  REQUIRE(t.rows.size() == 5);
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    CHECK(t.rows[i].bits < t.rows[i - 1].bits);
    CHECK(t.rows[i].snr < t.rows[i - 1].snr);
  }
  std::vector<SweepRow> by_snr = t.rows;
  std::sort(by_snr.begin(), by_snr.end(), [](const SweepRow& a, const SweepRow& b) { return a.snr < b.snr; });
  for (std::size_t i = 1; i < by_snr.size(); ++i) {
    CHECK(by_snr[i].bits > by_snr[i - 1].bits);
  }
  for (const SweepRow& row : t.rows) {
    CHECK(row.lambda == 5.0);
    CHECK(row.x == row.sigma);
    CHECK(std::isfinite(row.snr));
  }

  const SweepTable threaded =
      sweep_capacity_vs_sigma(base, sigmas, QuadratureSpec{}, OptimizerSpec{}, DensityMode::kNormalized, 3);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    CHECK(threaded.rows[i].bits == t.rows[i].bits);
    CHECK(threaded.rows[i].snr == t.rows[i].snr);
  }
}

TEST_CASE("sweep_capacity_vs_sigma: single row equals channel_capacity") {
  const std::vector<double> sigma{12.0};
  OptimizerSpec ospec;
  ospec.grid_points = 24;
  const SweepTable t = sweep_capacity_vs_sigma(NoiseParams{}, sigma, QuadratureSpec{}, ospec, DensityMode::kPaperLiteral);
  REQUIRE(t.rows.size() == 1);
  const CapacityResult r = channel_capacity(with(5.0, 0.0, 12.0), QuadratureSpec{}, ospec, DensityMode::kPaperLiteral);
  CHECK(t.rows[0].bits == r.capacity_bits);
  CHECK(t.rows[0].mu_x_star == r.mu_x_star);
}

TEST_CASE("sweep_capacity: input validation and lambda sweep") {
  const std::vector<double> unsorted{5.0, 3.0};
  CHECK_THROWS_AS(sweep_capacity_vs_sigma(NoiseParams{}, unsorted, QuadratureSpec{}, OptimizerSpec{}, DensityMode::kNormalized), InvalidParams);
  const std::vector<double> nonpositive{0.0, 3.0};
  CHECK_THROWS_AS(sweep_capacity_vs_sigma(NoiseParams{}, nonpositive, QuadratureSpec{}, OptimizerSpec{}, DensityMode::kNormalized), InvalidParams);

  const std::vector<double> lambdas{0.0, 5.0, 10.0};
  OptimizerSpec ospec;
  ospec.grid_points = 16;
  const SweepTable t = sweep_capacity_vs_lambda(NoiseParams{}, lambdas, QuadratureSpec{}, ospec, DensityMode::kNormalized);
  REQUIRE(t.rows.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(t.rows[i].lambda == lambdas[i]);
    CHECK(t.rows[i].sigma == 15.0);
    CHECK(std::isfinite(t.rows[i].bits));
  }
}
