#include "hybridcap/mc_oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>

#include "hybridcap/error.hpp"
#include "hybridcap/noise_model.hpp"

namespace hybridcap {

namespace {

constexpr double kInversionLimit = 30.0;
constexpr double kMaxOutsideFraction = 1e-3;

// Cubic Hermite interpolation of the CDF between knots, using the density as
// the exact derivative at each knot.
class ModelCdf {
 public:
  ModelCdf(const NoiseParams& params, const QuadratureSpec& spec) {
    const HybridNoise noise(params);
    const Interval support = noise_support(params);
    knots_ = panel_breakpoints(support, params.sigma / 8.0, 1 << 16);
    if (knots_.size() < 1025) {
      knots_ = panel_breakpoints(support, support.width() / 1024.0, 1024);
    }
    cdf_.assign(knots_.size(), 0.0);
    pdf_.assign(knots_.size(), 0.0);
    pdf_[0] = noise.pdf(knots_[0]);
    for (std::size_t i = 1; i < knots_.size(); ++i) {
      const double bp[] = {knots_[i - 1], knots_[i]};
      cdf_[i] = cdf_[i - 1] +
                integrate([&](double z) { return noise.pdf(z); }, std::span<const double>(bp), spec)
                    .value;
      pdf_[i] = noise.pdf(knots_[i]);
    }
    mass_ = cdf_.back();
    if (!(mass_ > 0.0)) {
      throw DegenerateInput("model density has zero mass");
    }
  }

  double operator()(double z) const {
    if (z <= knots_.front()) {
      return 0.0;
    }
    if (z >= knots_.back()) {
      return 1.0;
    }
    const auto upper = std::upper_bound(knots_.begin(), knots_.end(), z);
    const auto i = static_cast<std::size_t>(upper - knots_.begin()) - 1;
    const double h = knots_[i + 1] - knots_[i];
    const double s = (z - knots_[i]) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double value = (2 * s3 - 3 * s2 + 1) * cdf_[i] + (s3 - 2 * s2 + s) * h * pdf_[i] +
                         (-2 * s3 + 3 * s2) * cdf_[i + 1] + (s3 - s2) * h * pdf_[i + 1];
    return std::clamp(value / mass_, 0.0, 1.0);
  }

 private:
  std::vector<double> knots_;
  std::vector<double> cdf_;
  std::vector<double> pdf_;
  double mass_ = 0.0;
};

}  // namespace

void SampleSpec::validate() const {
  if (n_samples < 1) {
    throw InvalidParams("samples must be >= 1");
  }
}

void HistogramSpec::validate() const {
  if (n_bins < 1) {
    throw InvalidParams("histogram needs at least one bin");
  }
  Interval::make(range.lo, range.hi);
}

std::mt19937_64 substream_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

int sample_poisson(double lambda, std::mt19937_64& engine) {
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw InvalidParams("lambda must be finite and >= 0");
  }
  if (lambda == 0.0) {
    return 0;
  }
  if (lambda > kInversionLimit) {
    return std::poisson_distribution<int>(lambda)(engine);
  }
  const double u = std::generate_canonical<double, 53>(engine);
  int n = 0;
  double p = std::exp(-lambda);
  double cdf = p;
  while (u > cdf) {
    ++n;
    p *= lambda / n;
    if (p == 0.0) {
      break;
    }
    cdf += p;
  }
  return n;
}

std::vector<double> sample_hybrid(const NoiseParams& params, const SampleSpec& spec,
                                  std::size_t threads) {
  params.validate();
  spec.validate();
  if (!params.trunc.include_zero_term && params.lambda == 0.0) {
    throw InvalidParams("excluding the n = 0 term requires lambda > 0");
  }

  std::vector<double> out(spec.n_samples);
  const std::size_t blocks = (spec.n_samples + kSampleBlock - 1) / kSampleBlock;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t b = next++; b < blocks; b = next++) {
      auto engine = substream_engine(spec.seed, b);
      std::normal_distribution<double> gauss(params.mu, params.sigma);
      const std::size_t end = std::min(spec.n_samples, (b + 1) * kSampleBlock);
      for (std::size_t i = b * kSampleBlock; i < end; ++i) {
        int n = sample_poisson(params.lambda, engine);
        while (!params.trunc.include_zero_term && n == 0) {
          n = sample_poisson(params.lambda, engine);
        }
        out[i] = n + gauss(engine);
      }
    }
  };
  const std::size_t pool = std::clamp<std::size_t>(threads, 1, blocks);
  if (pool == 1) {
    worker();
  } else {
    std::vector<std::jthread> workers;
    for (std::size_t t = 0; t < pool; ++t) {
      workers.emplace_back(worker);
    }
  }
  return out;
}

double ks_distance(std::span<const double> samples, const NoiseParams& params,
                   const QuadratureSpec& spec) {
  if (samples.empty()) {
    throw InvalidParams("KS distance needs at least one sample");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const ModelCdf cdf(params, spec);
  const auto n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

EntropyEstimate empirical_entropy(std::span<const double> samples, const HistogramSpec& hspec) {
  hspec.validate();
  if (samples.empty()) {
    throw InvalidParams("entropy estimate needs at least one sample");
  }
  std::vector<std::size_t> counts(hspec.n_bins, 0);
  const double width = hspec.range.width() / static_cast<double>(hspec.n_bins);
  std::size_t outside = 0;
  for (double x : samples) {
    if (!hspec.range.contains(x)) {
      ++outside;
      continue;
    }
    const auto bin = std::min(static_cast<std::size_t>((x - hspec.range.lo) / width), hspec.n_bins - 1);
    ++counts[bin];
  }

  EntropyEstimate est;
  est.bin_width = width;
  est.outside_fraction = static_cast<double>(outside) / static_cast<double>(samples.size());
  if (est.outside_fraction > kMaxOutsideFraction) {
    throw InsufficientCoverage(std::to_string(100.0 * est.outside_fraction) +
                               "% of samples fall outside the histogram range");
  }
  const auto total = static_cast<double>(samples.size());
  for (std::size_t c : counts) {
    if (c == 0) {
      continue;
    }
    const double p = static_cast<double>(c) / total;
    est.bits -= p * std::log2(p / width);
  }
  est.degenerate = hspec.n_bins == 1;
  return est;
}

}  // namespace hybridcap
