#include "pacbound/conditioned.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace pacbound {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// exponent * log_base with the 0 * (-inf) corner pinned to 0 (p^0 = 1).
inline double log_pow(double log_base, std::int64_t exponent) {
  return exponent == 0 ? 0.0 : static_cast<double>(exponent) * log_base;
}

void check_p_delta(double p_delta) {
  if (!(p_delta >= 0.0 && p_delta <= 1.0))
    throw std::domain_error("p_delta must lie in [0,1]");
}

// Pieces of the conditioned sum that depend only on the query, hoisted out of
// the root-finding loops.
class ConditionedSum {
 public:
  explicit ConditionedSum(const RiskQuery& q)
      : m_(q.m), inv_c_(1.0 / q.loss_range) {
    log_binom_.reserve(static_cast<std::size_t>(m_));
    mean_shift_.reserve(static_cast<std::size_t>(m_));
    for (std::int64_t k = 1; k <= m_; ++k) {
      log_binom_.push_back(log_binomial(m_, k));
      mean_shift_.push_back(static_cast<double>(m_ - k) * q.r_hat * inv_c_ /
                            static_cast<double>(k));
    }
  }

  double log_value(double s, double log_p, double log_1mp) const {
    std::vector<double> terms;
    terms.reserve(log_binom_.size());
    for (std::int64_t k = 1; k <= m_; ++k) {
      const double log_weight = log_binom_[static_cast<std::size_t>(k - 1)] +
                                log_pow(log_p, m_ - k) + log_pow(log_1mp, k);
      if (log_weight == kNegInf) continue;  // zero-probability term
      const double dev = mean_shift_[static_cast<std::size_t>(k - 1)] + s * inv_c_;
      terms.push_back(log_weight - 2.0 * static_cast<double>(m_) * dev * dev);
    }
    if (terms.empty()) return kNegInf;
    return log_sum_exp(terms);
  }

  double value(double s, double p_delta) const {
    const double lv = log_value(s, std::log(p_delta), std::log1p(-p_delta));
    // Mathematically <= 1 - p^m; clip the last-ulp excess of exp().
    return std::min(1.0, std::exp(lv));
  }

 private:
  std::int64_t m_;
  double inv_c_;
  std::vector<double> log_binom_;
  std::vector<double> mean_shift_;
};

double classic_m1_bound(const RiskQuery& q) {
  RiskQuery base = q;
  base.hypothesis_count = 1;
  return hoeffding_bound(base).bound;
}

}  // namespace

RegionKnowledge RegionKnowledge::exact(double p_delta) {
  RegionKnowledge rk;
  rk.value = p_delta;
  rk.validate();
  return rk;
}

RegionKnowledge RegionKnowledge::from_counts(std::int64_t m_a,
                                             std::int64_t hits, double alpha) {
  RegionKnowledge rk;
  rk.value = Estimate{m_a, hits, alpha};
  rk.validate();
  return rk;
}

void RegionKnowledge::validate() const {
  if (is_exact()) {
    check_p_delta(std::get<double>(value));
    return;
  }
  const auto& e = std::get<Estimate>(value);
  if (e.m_a < 1)
    throw std::domain_error("RegionKnowledge: m_a must be a positive integer");
  if (e.hits < 0 || e.hits > e.m_a)
    throw std::domain_error("RegionKnowledge: hits must lie in [0, m_a]");
  if (!(e.alpha > 0.0 && e.alpha < 1.0))
    throw std::domain_error("RegionKnowledge: alpha must lie in (0,1)");
}

double log_conditional_failure_prob(double s, const RiskQuery& q,
                                    double p_delta) {
  q.validate();
  check_p_delta(p_delta);
  if (!(s >= 0.0))
    throw std::domain_error("conditional_failure_prob: s must be >= 0");
  return ConditionedSum(q).log_value(s, std::log(p_delta),
                                     std::log1p(-p_delta));
}

double conditional_failure_prob(double s, const RiskQuery& q, double p_delta) {
  q.validate();
  check_p_delta(p_delta);
  if (!(s >= 0.0))
    throw std::domain_error("conditional_failure_prob: s must be >= 0");
  return ConditionedSum(q).value(s, p_delta);
}

BoundResult implicit_bound(const RiskQuery& q, double p_delta, double abs_tol) {
  q.validate();
  check_p_delta(p_delta);
  const double s0 = classic_m1_bound(q);
  const ConditionedSum sum(q);
  const double log_p = std::log(p_delta);
  const double log_1mp = std::log1p(-p_delta);
  const double log_delta = std::log(q.delta);

  BoundResult out;
  out.method = Method::implicit;
  out.confidence = 1.0 - q.delta;

  const double f0 = sum.log_value(0.0, log_p, log_1mp) - log_delta;
  if (s0 == 0.0 || f0 <= 0.0) {
    // Failure probability already below delta with no offset at all.
    out.bound = 0.0;
    out.diagnostics.clamped = true;
    out.diagnostics.residual = f0;
  } else {
    SolverConfig cfg;
    cfg.abs_tol = abs_tol;
    cfg.bracket_lo = 0.0;
    cfg.bracket_hi = s0;  // value there is <= delta (1 - p^m)
    const RootResult r = solve_monotone_decreasing(
        [&](double s) { return sum.log_value(s, log_p, log_1mp) - log_delta; },
        cfg);
    out.bound = r.root;
    out.diagnostics.iterations = r.iterations;
    out.diagnostics.residual = r.residual;
    out.diagnostics.clamped = r.clamped;
  }
  out.diagnostics.effective = std::min(out.bound, q.loss_range - q.r_hat);
  return out;
}

BoundResult closed_form_bound(const RiskQuery& q, double p_delta) {
  q.validate();
  check_p_delta(p_delta);
  const double u = std::pow(q.delta, 1.0 / static_cast<double>(q.m));
  const double omp = 1.0 - p_delta;
  const double num = omp + std::sqrt(omp * omp + 4.0 * u * p_delta);
  // The ratio is >= 1; max() absorbs a last-ulp negative log at delta = 1.
  const double arg = std::max(0.0, std::log(num / (2.0 * u)));
  BoundResult out;
  out.method = Method::closed_form;
  out.confidence = 1.0 - q.delta;
  out.bound = q.loss_range * std::sqrt(arg / 2.0);
  out.diagnostics.effective = std::min(out.bound, q.loss_range - q.r_hat);
  return out;
}

double updated_confidence(const RiskQuery& q, double p_delta) {
  q.validate();
  check_p_delta(p_delta);
  return ConditionedSum(q).value(classic_m1_bound(q), p_delta);
}

RootResult required_pdelta_for_confidence(double target_delta,
                                          const RiskQuery& q, double abs_tol) {
  q.validate();
  if (!(target_delta > 0.0) || target_delta > q.delta)
    throw std::domain_error(
        "required_pdelta_for_confidence: target must lie in (0, delta]");
  const ConditionedSum sum(q);
  const double s0 = classic_m1_bound(q);
  SolverConfig cfg;
  cfg.abs_tol = abs_tol;
  cfg.bracket_lo = 0.0;
  cfg.bracket_hi = 1.0;
  return solve_monotone_decreasing(
      [&](double p) {
        const double lv = sum.log_value(s0, std::log(p), std::log1p(-p));
        return std::min(1.0, std::exp(lv)) - target_delta;
      },
      cfg);
}

RootResult required_pdelta_for_bound(double target_s, const RiskQuery& q,
                                     double abs_tol) {
  q.validate();
  const double s0 = classic_m1_bound(q);
  if (!(target_s > 0.0) || target_s > s0 * (1.0 + 1e-12))
    throw std::domain_error(
        "required_pdelta_for_bound: target must lie in (0, s0], the M=1 "
        "classical bound");
  const double inner_tol = std::min(abs_tol, 1e-13);
  SolverConfig cfg;
  cfg.abs_tol = abs_tol;
  cfg.bracket_lo = 0.0;
  cfg.bracket_hi = 1.0;
  return solve_monotone_decreasing(
      [&](double p) { return implicit_bound(q, p, inner_tol).bound - target_s; },
      cfg);
}

}  // namespace pacbound
