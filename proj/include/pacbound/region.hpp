// region.hpp — estimating the region mass from membership counts: the plug-in
// estimate, the one-sided Clopper-Pearson lower limit, and the combined
// delta + alpha(1-delta) confidence accounting.
#pragma once

#include <cstdint>

#include "pacbound/conditioned.hpp"

namespace pacbound {

// Membership count over an auxiliary i.i.d. sample: hits of m_a landed in
// the region.
struct MembershipSample {
  std::int64_t m_a = 1;
  std::int64_t hits = 0;

  void validate() const;
};

// hits / m_a, exactly.
double estimate_pdelta(const MembershipSample& ms);

// One-sided 1-alpha lower confidence limit for the region mass: the alpha
// quantile of Beta(hits, m_a - hits + 1). hits = 0 degenerates to 0.
double clopper_pearson_lower(const MembershipSample& ms, double alpha);

// Total failure probability after spending alpha on the region estimate:
// delta + alpha (1 - delta).
double combined_confidence(double delta, double alpha);

// Full pipeline: lower-bound the region mass, evaluate the chosen conditioned
// bound there, and degrade the reported confidence to
// 1 - (delta + alpha(1-delta)). Diagnostics record p_hat and p_lower.
BoundResult bound_with_estimated_region(const RiskQuery& q,
                                        const MembershipSample& ms,
                                        double alpha, Method method);

}  // namespace pacbound
