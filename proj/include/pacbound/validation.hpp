// validation.hpp — ground-truth oracles: exact enumeration of failure
// probabilities on small discrete worlds, Monte Carlo coverage simulation,
// and a numerical check of the moment-generating-function bound behind the
// closed-form result.
//
// The enumeration and trial loops are data-parallel. The OpenMP kernels
// accumulate per-chunk (or per-trial) partials and combine them in a fixed
// order, so results are bitwise identical to the serial reference for any
// thread count.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pacbound/classic.hpp"
#include "pacbound/scenario.hpp"

namespace pacbound {

// Counter-based splitting: each (seed, counter) pair yields an independent
// stream, so trials are order-insensitive under parallel execution.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t counter);

// All samples of size m over the scenario's support, grouped by multiset.
struct ExactFailureReport {
  double unconditional = 0.0;  // P(R > r_hat + s)
  double conditional = 0.0;    // equal by construction: the region is zero-loss
  // Index k = 0..m: P(exactly k of the m samples fall outside the region).
  std::vector<double> outside_count_prob;
  // Index k = 1..m: P(R > (m/k) r_hat + s | exactly k outside); entry 0 unused.
  std::vector<double> conditional_fail_by_k;
};

// Multiset-grouped enumeration (multinomial weights); the default route.
ExactFailureReport exact_failure_probability(const DiscreteScenario& sc, int m,
                                             double s);

// Raw-sequence enumeration over |Z|^m samples; cross-check oracle for the
// multiset route and the OpenMP enumeration kernel.
ExactFailureReport exact_failure_probability_sequences(
    const DiscreteScenario& sc, int m, double s);

// Exact, enumeration-based analogue of a coverage trial: for every sample of
// size m, solve the chosen bound at the realised r_hat and accumulate the
// mass where the bound fails. failure_mass <= delta is the soundness check.
struct ExactCoverageReport {
  double failure_mass = 0.0;
  double coverage = 0.0;  // 1 - failure_mass
  double mean_bound = 0.0;
  double mean_r_hat = 0.0;
  Method method = Method::classic;
};

ExactCoverageReport exact_coverage(const DiscreteScenario& sc, int m,
                                   double delta, Method method);

struct CoverageReport {
  std::int64_t trials = 0;
  double coverage = 0.0;  // fraction of trials with R <= r_hat + bound
  double mean_bound = 0.0;
  double mean_r_hat = 0.0;
  std::uint64_t seed = 0;
  Method method = Method::classic;
};

// Repeated sampling: draw m i.i.d. points, bound at the realised r_hat with
// p_delta = region_mass(sc), record whether the true risk is covered.
// Deterministic given the seed.
CoverageReport monte_carlo_coverage(const DiscreteScenario& sc, std::int64_t m,
                                    double delta, Method method,
                                    std::int64_t trials, std::uint64_t seed);

// Serial reference for the OpenMP trial loop; identical output.
CoverageReport monte_carlo_coverage_serial(const DiscreteScenario& sc,
                                           std::int64_t m, double delta,
                                           Method method, std::int64_t trials,
                                           std::uint64_t seed);

struct SupportPoint {
  double value = 0.0;
  double mass = 0.0;
};

struct LemmaBoundCheck {
  double lhs = 0.0;  // exact E[exp(t sum (U_i - E U_i))] by enumeration
  double rhs = 0.0;  // exp(n t^2 (b-a)^2 / 8)
};

// Exact MGF of n i.i.d. copies of a finite-support variable against the
// sub-Gaussian envelope exp(n t^2 (b-a)^2 / 8); lhs <= rhs must hold.
LemmaBoundCheck hoeffding_lemma_check(std::span<const SupportPoint> support,
                                      int n, double t);

}  // namespace pacbound
