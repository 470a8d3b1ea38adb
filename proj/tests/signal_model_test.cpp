#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hybridcap/error.hpp"
#include "hybridcap/noise_model.hpp"
#include "hybridcap/signal_model.hpp"
#include "oracles.hpp"

using namespace hybridcap;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

NoiseParams with(double lambda, double mu, double sigma, bool include_zero = true) {
  NoiseParams p;
  p.lambda = lambda;
  p.mu = mu;
  p.sigma = sigma;
  p.trunc.include_zero_term = include_zero;
  return p;
}

double received_mass(const TransmitEstimate& est, const NoiseParams& p, DensityMode mode) {
  const ReceivedDensity density(p);
  return integrate([&](double y) { return received_pdf(y, est, p, mode); }, density.breakpoints()).value;
}

}  // namespace

TEST_CASE("received_pdf: window integral agrees with nested quadrature") {
  for (const NoiseParams& p : {with(5.0, 0.0, 15.0), with(2.0, -1.0, 0.7), with(8.0, 3.0, 4.0, false)}) {
    const ReceivedDensity density(p);
    const HybridNoise noise(p);
    for (double y : {-30.0, -2.0, 0.0, 1.3, 3.1, 6.0, 9.5, 25.0}) {
      const double nested =
          integrate([&](double t) { return noise.pdf(y - t); }, Interval::make(0.0, kTwoPi)).value;
      CHECK(density.window(y) == doctest::Approx(nested).epsilon(1e-9));
    }
  }
}

TEST_CASE("received_pdf: paper-literal scaling and mass") {
  const NoiseParams p = with(5.0, 0.0, 15.0);
  for (double y : {-10.0, 0.0, 4.0, 30.0}) {
    CHECK(received_pdf(y, TransmitEstimate{0.0}, p, DensityMode::kPaperLiteral) == 0.0);
  }
  const double mass = received_mass(TransmitEstimate{kPi}, p, DensityMode::kPaperLiteral);
  CHECK(std::abs(mass - 2.0 * kPi * kPi) < 1e-6);
  CHECK(std::abs(2.0 * kPi * kPi - 19.7392088022) < 1e-9);
}

TEST_CASE("received_pdf: near-delta noise gives the uniform window") {
  const NoiseParams p = with(1e-12, 0.0, 0.05);
  const double f = received_pdf(3.0, TransmitEstimate{1.0}, p, DensityMode::kNormalized);
  CHECK(std::abs(f - 1.0 / kTwoPi) < 1e-3);
  CHECK(std::abs(1.0 / kTwoPi - 0.15915) < 1e-5);
}

TEST_CASE("received_pdf: normalized mode") {
  const NoiseParams p = with(5.0, 0.0, 15.0);
  CHECK_THROWS_AS(received_pdf(1.0, TransmitEstimate{0.0}, p, DensityMode::kNormalized), DegenerateInput);
  CHECK(std::abs(received_mass(TransmitEstimate{2.0}, p, DensityMode::kNormalized) - 1.0) < 1e-6);
  CHECK(received_pdf(4.0, TransmitEstimate{1.0}, p, DensityMode::kNormalized) ==
        received_pdf(4.0, TransmitEstimate{2.0 * kPi}, p, DensityMode::kNormalized));
}

TEST_CASE("property: received density invariants") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lam(0.0, 10.0), sig(0.5, 30.0), mux(0.05, kTwoPi), mu(-5.0, 5.0);
  for (int trial = 0; trial < 10; ++trial) {
    const NoiseParams p = with(lam(rng), mu(rng), sig(rng));
    const TransmitEstimate est{mux(rng)};
    const ReceivedDensity density(p);
    const double noise_mass = density.noise().mass();
    CHECK(std::abs(received_mass(est, p, DensityMode::kPaperLiteral) - kTwoPi * est.mu_x * noise_mass) < 1e-6);
    CHECK(std::abs(received_mass(est, p, DensityMode::kNormalized) - 1.0) < 1e-6);
    const Interval s = density.support();
    for (int k = 0; k <= 20; ++k) {
      const double y = s.lo + s.width() * k / 20.0;
      CHECK(received_pdf(y, est, p, DensityMode::kPaperLiteral) >= 0.0);
    }
    CHECK(std::abs(received_mean(est, p) - (kPi + p.lambda + p.mu)) < 1e-5);
  }
}

TEST_CASE("received_entropy") {
  const QuadratureSpec spec;
  const NoiseParams reference = with(5.0, 0.0, 15.0);
  CHECK(received_entropy(TransmitEstimate{0.0}, reference, spec, DensityMode::kPaperLiteral) == 0.0);
  CHECK_THROWS_AS(received_entropy(TransmitEstimate{0.0}, reference, spec, DensityMode::kNormalized), DegenerateInput);

  const NoiseParams gauss = with(1e-12, 0.0, 15.0);
  CHECK(received_entropy(TransmitEstimate{1.0}, gauss, spec, DensityMode::kNormalized) ==
        received_entropy(TransmitEstimate{kTwoPi}, gauss, spec, DensityMode::kNormalized));

  // h(c g) = c h(g) - c log2(c) mass(g) with g the normalized density and
  // c = 2 pi mu_x mass(f_Z).
  const double h_norm = received_entropy(TransmitEstimate{kPi}, reference, spec, DensityMode::kNormalized);
  const double h_lit = received_entropy(TransmitEstimate{kPi}, reference, spec, DensityMode::kPaperLiteral);
  const double c = kTwoPi * kPi * HybridNoise(reference).mass();
  CHECK(std::abs(h_lit - (c * h_norm - c * std::log2(c))) < 1e-6);
  CHECK(std::abs(h_lit - 33.1044890981) < 1e-8);
  CHECK(std::abs(h_norm - 5.98008526859) < 1e-9);
}

TEST_CASE("received_entropy: near-delta noise approaches the uniform entropy") {
  const NoiseParams p = with(1e-12, 0.0, 0.05);
  const double h = received_entropy(TransmitEstimate{1.0}, p, QuadratureSpec{}, DensityMode::kNormalized);
  CHECK(std::abs(h - std::log2(kTwoPi)) < 0.05);
}

TEST_CASE("received_mean") {
  const QuadratureSpec spec;
  CHECK(std::abs(received_mean(TransmitEstimate{1.0}, with(1e-12, 0.0, 15.0), spec) - kPi) < 1e-6);
  CHECK(std::abs(received_mean(TransmitEstimate{1.0}, with(5.0, 0.0, 15.0), spec) - (kPi + 5.0)) < 1e-5);
  CHECK(received_mean(TransmitEstimate{1.0}, with(5.0, 0.0, 15.0), spec) ==
        received_mean(TransmitEstimate{2.0}, with(5.0, 0.0, 15.0), spec));
  CHECK_THROWS_AS(received_mean(TransmitEstimate{0.0}, with(5.0, 0.0, 15.0), spec), DegenerateInput);
}

TEST_CASE("transmit estimate validation") {
  CHECK_THROWS_AS(TransmitEstimate{7.0}.validate(), InvalidParams);
  CHECK_THROWS_AS(TransmitEstimate{-0.1}.validate(), InvalidParams);
  CHECK_NOTHROW(TransmitEstimate{kTwoPi}.validate());
  CHECK(parse_density_mode("normalized") == DensityMode::kNormalized);
  CHECK(parse_density_mode("paper-literal") == DensityMode::kPaperLiteral);
  CHECK_THROWS_AS(parse_density_mode("literal"), InvalidParams);
}

TEST_CASE("bloch_angles: endpoint and resonance cases") {
  const RabiConfig start{0.6, 1.0, 0.0};
  CHECK(bloch_theta(start) == doctest::Approx(kPi).epsilon(1e-15));
  CHECK_THROWS_AS(bloch_angles(start), Singularity);

  for (double t : {0.3, 1.1, 2.9}) {
    const RabiConfig resonant{2.0, 2.0, t};
    CHECK(bloch_theta(resonant) == doctest::Approx(2.0 * std::acos(std::sin(t))).epsilon(1e-14));
    CHECK_THROWS_AS(bloch_phi(resonant), Singularity);
  }
}

TEST_CASE("bloch_angles: arbitrary-precision reference values") {
  // Omega / Omega_g = 0.6; references from 40-digit evaluations of the
  // theta and psi(theta) formulas.
  const BlochAngles quarter = bloch_angles(RabiConfig{0.6, 1.0, kPi});
  CHECK(std::abs(quarter.theta - 1.854590436003224464857) < 1e-12);
  CHECK(std::abs(quarter.phi) < 1e-7);

  const BlochAngles other = bloch_angles(RabiConfig{0.6, 1.0, 2.5});
  CHECK(std::abs(other.theta - 1.930063510605178427054) < 1e-12);
  CHECK(std::abs(other.phi - (-0.453005273528591811347)) < 1e-12);
}

TEST_CASE("bloch_angles: arcsin argument out of range") {
  CHECK_THROWS_AS(bloch_phi(RabiConfig{0.6, 1.0, 0.2}), OutOfDomain);
  CHECK_THROWS_AS(RabiConfig({1.5, 1.0, 1.0}).validate(), InvalidParams);
  CHECK_THROWS_AS(bloch_theta(RabiConfig{0.0, 1.0, 1.0}), InvalidParams);
  CHECK_THROWS_AS(bloch_theta(RabiConfig{0.5, 1.0, -1.0}), InvalidParams);
}

TEST_CASE("working_point") {
  CHECK(working_point({0.0, 1.0}) == 0.0);
  CHECK(working_point({1.0, 1.0}) == doctest::Approx(kPi / 4).epsilon(1e-15));
  CHECK(working_point({1.0, 0.0}) == doctest::Approx(kPi / 2).epsilon(1e-15));
  CHECK(working_point({0.0, -1.0}) == kPi);
  CHECK(working_point({-0.0, -1.0}) == kPi);
  CHECK(working_point({-1.0, 0.0}) == doctest::Approx(-kPi / 2).epsilon(1e-15));
  CHECK_THROWS_AS(working_point({0.0, 0.0}), InvalidParams);
}
