#include "pacbound/region.hpp"

#include <cmath>
#include <stdexcept>

namespace pacbound {

void MembershipSample::validate() const {
  if (m_a < 1)
    throw std::domain_error("MembershipSample: m_a must be a positive integer");
  if (hits < 0 || hits > m_a)
    throw std::domain_error("MembershipSample: hits must lie in [0, m_a]");
}

double estimate_pdelta(const MembershipSample& ms) {
  ms.validate();
  return static_cast<double>(ms.hits) / static_cast<double>(ms.m_a);
}

double clopper_pearson_lower(const MembershipSample& ms, double alpha) {
  ms.validate();
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("clopper_pearson_lower: alpha must lie in (0,1)");
  // hits = 0 makes the first shape parameter 0, where the Beta distribution
  // degenerates; the lower limit is 0.
  if (ms.hits == 0) return 0.0;
  return beta_quantile(alpha, static_cast<double>(ms.hits),
                       static_cast<double>(ms.m_a - ms.hits) + 1.0);
}

double combined_confidence(double delta, double alpha) {
  if (!(delta >= 0.0 && delta < 1.0))
    throw std::domain_error("combined_confidence: delta must lie in [0,1)");
  if (!(alpha >= 0.0 && alpha < 1.0))
    throw std::domain_error("combined_confidence: alpha must lie in [0,1)");
  return delta + alpha * (1.0 - delta);
}

BoundResult bound_with_estimated_region(const RiskQuery& q,
                                        const MembershipSample& ms,
                                        double alpha, Method method) {
  q.validate();
  ms.validate();
  const double p_hat = estimate_pdelta(ms);
  const double p_lower = clopper_pearson_lower(ms, alpha);

  BoundResult out;
  switch (method) {
    case Method::implicit:
      out = implicit_bound(q, p_lower);
      break;
    case Method::closed_form:
      out = closed_form_bound(q, p_lower);
      break;
    default:
      throw std::domain_error(
          "bound_with_estimated_region: method must be implicit or "
          "closed-form");
  }
  out.confidence = 1.0 - combined_confidence(q.delta, alpha);
  out.diagnostics.p_hat = p_hat;
  out.diagnostics.p_lower = p_lower;
  return out;
}

}  // namespace pacbound
