#include "pacbound/classic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pacbound {

std::string to_string(Method method) {
  switch (method) {
    case Method::classic: return "classic";
    case Method::implicit: return "implicit";
    case Method::closed_form: return "closed-form";
  }
  throw std::logic_error("to_string: unknown method");
}

Method method_from_string(const std::string& name) {
  if (name == "classic") return Method::classic;
  if (name == "implicit") return Method::implicit;
  if (name == "closed-form" || name == "closed_form") return Method::closed_form;
  throw std::domain_error("unknown method '" + name +
                          "' (expected classic, implicit or closed-form)");
}

void RiskQuery::validate() const {
  if (m < 1) throw std::domain_error("RiskQuery: m must be a positive integer");
  if (!(delta > 0.0 && delta <= 1.0))
    throw std::domain_error("RiskQuery: delta must lie in (0,1]");
  if (!(loss_range > 0.0))
    throw std::domain_error("RiskQuery: loss range C must be > 0");
  if (!(r_hat >= 0.0 && r_hat <= loss_range))
    throw std::domain_error("RiskQuery: r_hat must lie in [0, C]");
  if (hypothesis_count < 1)
    throw std::domain_error("RiskQuery: hypothesis count M must be >= 1");
}

BoundResult hoeffding_bound(const RiskQuery& q) {
  q.validate();
  const double ratio = static_cast<double>(q.hypothesis_count) / q.delta;
  BoundResult out;
  out.method = Method::classic;
  out.confidence = 1.0 - q.delta;
  out.bound = ratio <= 1.0
                  ? 0.0
                  : q.loss_range *
                        std::sqrt(std::log(ratio) /
                                  (2.0 * static_cast<double>(q.m)));
  out.diagnostics.effective = std::min(out.bound, q.loss_range - q.r_hat);
  return out;
}

double hoeffding_confidence(std::int64_t m, double s,
                            std::int64_t hypothesis_count, double loss_range) {
  if (m < 1) throw std::domain_error("hoeffding_confidence: m must be >= 1");
  if (!(s >= 0.0)) throw std::domain_error("hoeffding_confidence: s must be >= 0");
  if (hypothesis_count < 1)
    throw std::domain_error("hoeffding_confidence: M must be >= 1");
  if (!(loss_range > 0.0))
    throw std::domain_error("hoeffding_confidence: C must be > 0");
  const double z = s / loss_range;
  return std::min(1.0, static_cast<double>(hypothesis_count) *
                           std::exp(-2.0 * static_cast<double>(m) * z * z));
}

std::int64_t sample_size_for_bound(double s_target, double delta,
                                   std::int64_t hypothesis_count,
                                   double loss_range) {
  if (!(s_target > 0.0))
    throw std::domain_error("sample_size_for_bound: target must be > 0");
  if (!(delta > 0.0 && delta <= 1.0))
    throw std::domain_error("sample_size_for_bound: delta must lie in (0,1]");
  if (hypothesis_count < 1)
    throw std::domain_error("sample_size_for_bound: M must be >= 1");
  if (!(loss_range > 0.0))
    throw std::domain_error("sample_size_for_bound: C must be > 0");
  const double ratio = static_cast<double>(hypothesis_count) / delta;
  if (ratio <= 1.0) return 1;  // any m satisfies a zero bound target

  const auto bound_at = [&](std::int64_t m) {
    return loss_range *
           std::sqrt(std::log(ratio) / (2.0 * static_cast<double>(m)));
  };
  const double raw =
      loss_range * loss_range * std::log(ratio) / (2.0 * s_target * s_target);
  std::int64_t m = std::max<std::int64_t>(1, std::llround(std::ceil(raw)));
  // The ceiling of a rounded quotient can land one off; settle it against the
  // defining predicate.
  while (m > 1 && bound_at(m - 1) <= s_target) --m;
  while (bound_at(m) > s_target) ++m;
  return m;
}

double test_size_increase(double decrease) {
  if (!(decrease > 0.0 && decrease < 1.0))
    throw std::domain_error("test_size_increase: decrease must lie in (0,1)");
  const double shrink = 1.0 - decrease;
  return 100.0 * (1.0 / (shrink * shrink) - 1.0);
}

}  // namespace pacbound
