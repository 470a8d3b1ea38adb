#pragma once

#include <variant>

namespace hybridcap {

/// Keep Poisson terms n <= N.
struct FixedTerms {
  int n = 100;
};

/// Keep the smallest prefix of Poisson terms whose upper tail mass is below
/// epsilon.
struct TailBound {
  double epsilon = 1e-15;
};

struct TruncationPolicy {
  std::variant<FixedTerms, TailBound> mode = FixedTerms{};
  /// When false the n = 0 Poisson term is dropped, so the mixture carries
  /// mass 1 - exp(-lambda) instead of 1.
  bool include_zero_term = true;
};

/// Hybrid noise Z = N1 + N2 with N1 ~ Poisson(lambda), N2 ~ Normal(mu, sigma^2).
struct NoiseParams {
  double lambda = 5.0;
  double mu = 0.0;
  double sigma = 15.0;
  TruncationPolicy trunc{};

  /// Throws InvalidParams on lambda < 0, sigma <= 0, non-finite fields or an
  /// invalid truncation policy.
  void validate() const;
};

/// Inclusive range of Poisson indices kept by a truncation policy.
struct TermRange {
  int first = 0;
  int last = 0;

  int count() const { return last - first + 1; }
};

TermRange term_range(const NoiseParams& params);

}  // namespace hybridcap
