#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "hybridcap/noise_params.hpp"
#include "hybridcap/quadrature.hpp"

namespace hybridcap {

struct SampleSpec {
  std::size_t n_samples = 1'000'000;
  std::uint64_t seed = 42;

  void validate() const;
};

/// Samples are drawn in blocks of this size; block b uses substream b.
inline constexpr std::size_t kSampleBlock = std::size_t{1} << 16;

/// Independent generator for (seed, stream), seeded through std::seed_seq.
std::mt19937_64 substream_engine(std::uint64_t seed, std::uint64_t stream);

/// Poisson(lambda) by sequential CDF inversion for lambda <= 30, the
/// standard-library sampler above that.
int sample_poisson(double lambda, std::mt19937_64& engine);

/// Draws Z = N1 + N2. When the n = 0 term is excluded, zero Poisson draws are
/// rejected and redrawn, which samples the renormalized n >= 1 mixture.
/// Output is identical for every `threads` value.
std::vector<double> sample_hybrid(const NoiseParams& params, const SampleSpec& spec,
                                  std::size_t threads = 1);

/// Sup-distance between the empirical CDF of `samples` and the model CDF
/// built by cumulative quadrature of f_Z (renormalized to unit mass).
double ks_distance(std::span<const double> samples, const NoiseParams& params,
                   const QuadratureSpec& spec = {});

struct HistogramSpec {
  std::size_t n_bins = 512;
  Interval range;

  void validate() const;
};

struct EntropyEstimate {
  double bits = 0.0;
  double bin_width = 0.0;
  double outside_fraction = 0.0;
  /// Set for a single-bin histogram, where the estimate collapses to
  /// log2(bin width) scaled by the in-range fraction.
  bool degenerate = false;
};

/// Histogram plug-in estimate -sum p_i log2(p_i / width). Throws
/// InsufficientCoverage when more than 0.1% of samples fall outside the range.
EntropyEstimate empirical_entropy(std::span<const double> samples, const HistogramSpec& hspec);

}  // namespace hybridcap
