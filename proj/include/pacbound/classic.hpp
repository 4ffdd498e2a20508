// classic.hpp — the classical finite-class generalisation bound and its
// algebraic inversions (confidence for a fixed bound, sample size for a
// target bound, sample-growth percentages).
#pragma once

#include <cstdint>
#include <string>

#include "pacbound/numerics.hpp"

namespace pacbound {

enum class Method { classic, implicit, closed_form };

std::string to_string(Method method);
Method method_from_string(const std::string& name);

// Inputs every bound formula consumes.
struct RiskQuery {
  std::int64_t m = 1;                 // evaluating-sample size
  double delta = 0.05;                // failure probability
  double loss_range = 1.0;            // C: losses map to [0, C]
  double r_hat = 0.0;                 // evaluated error on the sample
  std::int64_t hypothesis_count = 1;  // M; conditioned bounds fix M = 1

  void validate() const;
};

struct Diagnostics {
  int iterations = 0;
  double residual = 0.0;
  bool clamped = false;
  double effective = 0.0;  // min(bound, C - r_hat): exposes vacuous bounds
  double p_hat = -1.0;     // region-estimation pipeline only; < 0 when unused
  double p_lower = -1.0;
};

struct BoundResult {
  double bound = 0.0;
  double confidence = 0.0;  // 1 - failure probability actually charged
  Method method = Method::classic;
  Diagnostics diagnostics;
};

// bound = C sqrt(ln(M/delta) / 2m); zero when M/delta <= 1.
BoundResult hoeffding_bound(const RiskQuery& q);

// The failure probability for which the classical bound equals s:
// min(1, M exp(-2 m s^2 / C^2)).
double hoeffding_confidence(std::int64_t m, double s,
                            std::int64_t hypothesis_count, double loss_range);

// Smallest m whose classical bound is <= s_target.
std::int64_t sample_size_for_bound(double s_target, double delta,
                                   std::int64_t hypothesis_count,
                                   double loss_range);

// Percentage increase in m that shrinks the classical bound by the given
// fraction: 100 (1/(1-d)^2 - 1), independent of the starting m.
double test_size_increase(double decrease);

}  // namespace pacbound
