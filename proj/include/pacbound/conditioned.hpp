// conditioned.hpp — bounds conditioned on a zero-loss region of known (or
// estimated) probability mass: the implicit tightened bound, its closed-form
// relaxation, the confidence update for the fixed classical bound, and the
// inverse queries (region mass needed for a target confidence or bound).
#pragma once

#include <cstdint>
#include <variant>

#include "pacbound/classic.hpp"

namespace pacbound {

// Knowledge about the zero-loss region: either its exact probability mass or
// a membership count to be turned into a one-sided lower confidence limit.
struct RegionKnowledge {
  struct Estimate {
    std::int64_t m_a = 1;   // auxiliary sample size
    std::int64_t hits = 0;  // samples that landed inside the region
    double alpha = 0.05;    // one-sided interval level
  };

  std::variant<double, Estimate> value;

  static RegionKnowledge exact(double p_delta);
  static RegionKnowledge from_counts(std::int64_t m_a, std::int64_t hits,
                                     double alpha);
  bool is_exact() const { return std::holds_alternative<double>(value); }
  void validate() const;
};

// Failure probability of the event R > r_hat + s after conditioning on a
// zero-loss region of mass p_delta:
//
//   sum_{k=1..m} C(m,k) exp(-2m ((m-k) r_hat / (C k) + s/C)^2) p^{m-k} (1-p)^k
//
// evaluated in log domain and exponentiated once. The deviation is measured
// in units of C throughout, so the k = m term reduces to the classical tail
// exp(-2m s^2/C^2) for any C.
double conditional_failure_prob(double s, const RiskQuery& q, double p_delta);
double log_conditional_failure_prob(double s, const RiskQuery& q,
                                    double p_delta);

// The s in [0, s0] at which the conditioned failure probability equals delta,
// where s0 is the M = 1 classical bound. Already below delta at s = 0 clamps
// to zero with the flag set.
BoundResult implicit_bound(const RiskQuery& q, double p_delta,
                           double abs_tol = 1e-12);

// Closed-form relaxation of the implicit bound:
//   C sqrt( ln( ((1-p) + sqrt((1-p)^2 + 4 d^{1/m} p)) / (2 d^{1/m}) ) / 2 ).
// Recovers the classical bound at p = 0; stays positive at p = 1.
BoundResult closed_form_bound(const RiskQuery& q, double p_delta);

// Updated failure probability of the fixed M = 1 classical bound after
// conditioning; equals delta at p = 0 and vanishes at p = 1.
double updated_confidence(const RiskQuery& q, double p_delta);

// Region mass needed to drive the updated failure probability down to
// target_delta (monotone root-find over p in [0,1]).
RootResult required_pdelta_for_confidence(double target_delta,
                                          const RiskQuery& q,
                                          double abs_tol = 1e-12);

// Region mass needed to shrink the implicit bound to target_s (monotone
// root-find over p with a nested s-solve per evaluation).
RootResult required_pdelta_for_bound(double target_s, const RiskQuery& q,
                                     double abs_tol = 1e-12);

}  // namespace pacbound
