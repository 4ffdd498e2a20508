#include "pacbound/validation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pacbound/conditioned.hpp"

namespace pacbound {

namespace {

constexpr std::uint64_t kEnumerationBudget = 10'000'000;

// Exact n! for n <= 20 (fits in 64 bits).
std::uint64_t factorial(int n) {
  std::uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

// m! / prod(counts!) as a double, from exact integer arithmetic.
double multinomial_coefficient(int m, const std::vector<int>& counts) {
  std::uint64_t denom = 1;
  for (const int c : counts) denom *= factorial(c);
  return static_cast<double>(factorial(m)) / static_cast<double>(denom);
}

// Number of multisets of size m over n symbols: C(m+n-1, n-1).
std::uint64_t multiset_count(int n, int m) {
  std::uint64_t c = 1;
  for (int i = 1; i <= n - 1; ++i) {
    c = c * static_cast<std::uint64_t>(m + i) / static_cast<std::uint64_t>(i);
    if (c > kEnumerationBudget) return c;
  }
  return c;
}

// Visit every multiset of m draws: fn(outside_count, r_hat, weight).
template <typename Fn>
void for_each_multiset(const DiscreteScenario& sc, int m, Fn&& fn) {
  const auto& pts = sc.points();
  const int n = static_cast<int>(pts.size());
  std::vector<int> counts(static_cast<std::size_t>(n), 0);

  const auto recurse = [&](auto&& self, int idx, int remaining,
                           double mass_product, double loss_sum,
                           int outside) -> void {
    if (idx == n - 1) {
      counts[static_cast<std::size_t>(idx)] = remaining;
      double prod = mass_product;
      for (int j = 0; j < remaining; ++j) prod *= pts[static_cast<std::size_t>(idx)].mass;
      const double loss_total =
          loss_sum + remaining * pts[static_cast<std::size_t>(idx)].loss;
      const int out_total =
          outside + (pts[static_cast<std::size_t>(idx)].in_region ? 0 : remaining);
      const double weight = multinomial_coefficient(m, counts) * prod;
      fn(out_total, loss_total / m, weight);
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      counts[static_cast<std::size_t>(idx)] = c;
      double prod = mass_product;
      for (int j = 0; j < c; ++j) prod *= pts[static_cast<std::size_t>(idx)].mass;
      self(self, idx + 1, remaining - c,
           prod, loss_sum + c * pts[static_cast<std::size_t>(idx)].loss,
           outside + (pts[static_cast<std::size_t>(idx)].in_region ? 0 : c));
    }
  };
  recurse(recurse, 0, m, 1.0, 0.0, 0);
}

void check_enumeration_args(const DiscreteScenario& sc, int m) {
  if (m < 1) throw std::domain_error("exact enumeration: m must be >= 1");
  if (m > 20)
    throw std::domain_error("exact enumeration: m must be <= 20");
  if (multiset_count(static_cast<int>(sc.points().size()), m) >
      kEnumerationBudget)
    throw std::domain_error("exact enumeration: budget of 1e7 states exceeded");
}

double bound_for(const RiskQuery& q, Method method, double p_delta) {
  switch (method) {
    case Method::classic: return hoeffding_bound(q).bound;
    case Method::implicit: return implicit_bound(q, p_delta).bound;
    case Method::closed_form: return closed_form_bound(q, p_delta).bound;
  }
  throw std::logic_error("bound_for: unknown method");
}

struct TrialOutcome {
  double bound = 0.0;
  double r_hat = 0.0;
  bool covered = false;
};

TrialOutcome run_trial(const DiscreteScenario& sc, std::int64_t m, double delta,
                       Method method, double p_delta, double risk,
                       std::uint64_t master_seed, std::int64_t trial) {
  SplitMix64 rng(derive_stream_seed(master_seed,
                                    static_cast<std::uint64_t>(trial)));
  double loss_sum = 0.0;
  for (std::int64_t i = 0; i < m; ++i) {
    const std::size_t idx = sc.sample_index(rng.next_unit());
    loss_sum += sc.points()[idx].loss;
  }
  TrialOutcome out;
  out.r_hat = loss_sum / static_cast<double>(m);
  RiskQuery q;
  q.m = m;
  q.delta = delta;
  q.loss_range = sc.loss_range();
  q.r_hat = out.r_hat;
  out.bound = bound_for(q, method, p_delta);
  out.covered = risk <= out.r_hat + out.bound;
  return out;
}

CoverageReport reduce_trials(const std::vector<TrialOutcome>& outcomes,
                             Method method, std::uint64_t seed) {
  CoverageReport rep;
  rep.trials = static_cast<std::int64_t>(outcomes.size());
  rep.seed = seed;
  rep.method = method;
  std::int64_t covered = 0;
  double bound_sum = 0.0;
  double r_hat_sum = 0.0;
  for (const auto& o : outcomes) {  // fixed order: thread-count independent
    covered += o.covered ? 1 : 0;
    bound_sum += o.bound;
    r_hat_sum += o.r_hat;
  }
  const double n = static_cast<double>(rep.trials);
  rep.coverage = static_cast<double>(covered) / n;
  rep.mean_bound = bound_sum / n;
  rep.mean_r_hat = r_hat_sum / n;
  return rep;
}

void check_mc_args(double delta, std::int64_t m, std::int64_t trials) {
  if (m < 1) throw std::domain_error("monte_carlo_coverage: m must be >= 1");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::domain_error("monte_carlo_coverage: delta must lie in (0,1)");
  if (trials < 1)
    throw std::domain_error("monte_carlo_coverage: trials must be >= 1");
}

}  // namespace

std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t counter) {
  // SplitMix finalizer over master + counter * golden ratio; avalanches so
  // that neighbouring counters give unrelated streams.
  std::uint64_t z = master + 0x9e3779b97f4a7c15ull * (counter + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

ExactFailureReport exact_failure_probability(const DiscreteScenario& sc, int m,
                                             double s) {
  check_enumeration_args(sc, m);
  if (!(s >= 0.0))
    throw std::domain_error("exact_failure_probability: s must be >= 0");
  const double risk = sc.true_risk();

  ExactFailureReport rep;
  rep.outside_count_prob.assign(static_cast<std::size_t>(m) + 1, 0.0);
  std::vector<double> joint(static_cast<std::size_t>(m) + 1, 0.0);
  for_each_multiset(sc, m, [&](int outside, double r_hat, double w) {
    rep.outside_count_prob[static_cast<std::size_t>(outside)] += w;
    if (risk > r_hat + s) rep.unconditional += w;
    if (outside >= 1 &&
        risk > (static_cast<double>(m) / outside) * r_hat + s)
      joint[static_cast<std::size_t>(outside)] += w;
  });
  rep.conditional = rep.unconditional;  // zero-loss region holds surely here
  rep.conditional_fail_by_k.assign(static_cast<std::size_t>(m) + 1, 0.0);
  for (int k = 1; k <= m; ++k) {
    const double pk = rep.outside_count_prob[static_cast<std::size_t>(k)];
    if (pk > 0.0)
      rep.conditional_fail_by_k[static_cast<std::size_t>(k)] =
          joint[static_cast<std::size_t>(k)] / pk;
  }
  return rep;
}

ExactFailureReport exact_failure_probability_sequences(
    const DiscreteScenario& sc, int m, double s) {
  if (m < 1) throw std::domain_error("exact enumeration: m must be >= 1");
  if (!(s >= 0.0))
    throw std::domain_error("exact_failure_probability: s must be >= 0");
  const auto& pts = sc.points();
  const std::uint64_t n = pts.size();
  std::uint64_t total = 1;
  for (int j = 0; j < m; ++j) {
    total *= n;
    if (total > kEnumerationBudget)
      throw std::domain_error(
          "exact enumeration: budget of 1e7 states exceeded");
  }
  const double risk = sc.true_risk();

  struct Accum {
    double uncond = 0.0;
    std::vector<double> pk;
    std::vector<double> joint;
  };
  constexpr std::uint64_t kChunk = 16384;
  const std::uint64_t chunks = (total + kChunk - 1) / kChunk;
  std::vector<Accum> partial(chunks);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c) {
    Accum& acc = partial[static_cast<std::size_t>(c)];
    acc.pk.assign(static_cast<std::size_t>(m) + 1, 0.0);
    acc.joint.assign(static_cast<std::size_t>(m) + 1, 0.0);
    const std::uint64_t begin = static_cast<std::uint64_t>(c) * kChunk;
    const std::uint64_t end = std::min(total, begin + kChunk);
    for (std::uint64_t idx = begin; idx < end; ++idx) {
      std::uint64_t t = idx;
      double w = 1.0;
      double loss_sum = 0.0;
      int outside = 0;
      for (int j = 0; j < m; ++j) {
        const auto& pt = pts[static_cast<std::size_t>(t % n)];
        t /= n;
        w *= pt.mass;
        loss_sum += pt.loss;
        outside += pt.in_region ? 0 : 1;
      }
      const double r_hat = loss_sum / m;
      acc.pk[static_cast<std::size_t>(outside)] += w;
      if (risk > r_hat + s) acc.uncond += w;
      if (outside >= 1 &&
          risk > (static_cast<double>(m) / outside) * r_hat + s)
        acc.joint[static_cast<std::size_t>(outside)] += w;
    }
  }

  ExactFailureReport rep;
  rep.outside_count_prob.assign(static_cast<std::size_t>(m) + 1, 0.0);
  std::vector<double> joint(static_cast<std::size_t>(m) + 1, 0.0);
  for (const auto& acc : partial) {  // chunk order: thread-count independent
    rep.unconditional += acc.uncond;
    for (int k = 0; k <= m; ++k) {
      rep.outside_count_prob[static_cast<std::size_t>(k)] +=
          acc.pk[static_cast<std::size_t>(k)];
      joint[static_cast<std::size_t>(k)] += acc.joint[static_cast<std::size_t>(k)];
    }
  }
  rep.conditional = rep.unconditional;
  rep.conditional_fail_by_k.assign(static_cast<std::size_t>(m) + 1, 0.0);
  for (int k = 1; k <= m; ++k) {
    const double pk = rep.outside_count_prob[static_cast<std::size_t>(k)];
    if (pk > 0.0)
      rep.conditional_fail_by_k[static_cast<std::size_t>(k)] =
          joint[static_cast<std::size_t>(k)] / pk;
  }
  return rep;
}

ExactCoverageReport exact_coverage(const DiscreteScenario& sc, int m,
                                   double delta, Method method) {
  check_enumeration_args(sc, m);
  if (!(delta > 0.0 && delta < 1.0))
    throw std::domain_error("exact_coverage: delta must lie in (0,1)");
  const double risk = sc.true_risk();
  const double p_delta = sc.region_mass();

  ExactCoverageReport rep;
  rep.method = method;
  for_each_multiset(sc, m, [&](int /*outside*/, double r_hat, double w) {
    RiskQuery q;
    q.m = m;
    q.delta = delta;
    q.loss_range = sc.loss_range();
    q.r_hat = r_hat;
    const double bound = bound_for(q, method, p_delta);
    if (risk > r_hat + bound) rep.failure_mass += w;
    rep.mean_bound += w * bound;
    rep.mean_r_hat += w * r_hat;
  });
  rep.coverage = 1.0 - rep.failure_mass;
  return rep;
}

CoverageReport monte_carlo_coverage(const DiscreteScenario& sc, std::int64_t m,
                                    double delta, Method method,
                                    std::int64_t trials, std::uint64_t seed) {
  check_mc_args(delta, m, trials);
  const double p_delta = sc.region_mass();
  const double risk = sc.true_risk();
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(trials));
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::int64_t t = 0; t < trials; ++t)
    outcomes[static_cast<std::size_t>(t)] =
        run_trial(sc, m, delta, method, p_delta, risk, seed, t);
  return reduce_trials(outcomes, method, seed);
}

CoverageReport monte_carlo_coverage_serial(const DiscreteScenario& sc,
                                           std::int64_t m, double delta,
                                           Method method, std::int64_t trials,
                                           std::uint64_t seed) {
  check_mc_args(delta, m, trials);
  const double p_delta = sc.region_mass();
  const double risk = sc.true_risk();
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(trials));
  for (std::int64_t t = 0; t < trials; ++t)
    outcomes[static_cast<std::size_t>(t)] =
        run_trial(sc, m, delta, method, p_delta, risk, seed, t);
  return reduce_trials(outcomes, method, seed);
}

LemmaBoundCheck hoeffding_lemma_check(std::span<const SupportPoint> support,
                                      int n, double t) {
  if (support.empty())
    throw std::domain_error("hoeffding_lemma_check: empty support");
  if (n < 1) throw std::domain_error("hoeffding_lemma_check: n must be >= 1");
  if (!(t > 0.0)) throw std::domain_error("hoeffding_lemma_check: t must be > 0");
  double total_mass = 0.0;
  double lo = support[0].value;
  double hi = support[0].value;
  double mean = 0.0;
  for (const auto& pt : support) {
    if (!(pt.mass > 0.0))
      throw std::domain_error("hoeffding_lemma_check: masses must be > 0");
    total_mass += pt.mass;
    lo = std::min(lo, pt.value);
    hi = std::max(hi, pt.value);
    mean += pt.mass * pt.value;
  }
  if (std::fabs(total_mass - 1.0) > 1e-12)
    throw std::domain_error(
        "hoeffding_lemma_check: masses must sum to 1 within 1e-12");
  const std::uint64_t size = support.size();
  std::uint64_t total = 1;
  for (int j = 0; j < n; ++j) {
    total *= size;
    if (total > kEnumerationBudget)
      throw std::domain_error(
          "hoeffding_lemma_check: budget of 1e7 states exceeded");
  }

  double lhs = 0.0;
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    std::uint64_t rest = idx;
    double w = 1.0;
    double centered_sum = 0.0;
    for (int j = 0; j < n; ++j) {
      const auto& pt = support[static_cast<std::size_t>(rest % size)];
      rest /= size;
      w *= pt.mass;
      centered_sum += pt.value - mean;
    }
    lhs += w * std::exp(t * centered_sum);
  }
  const double width = hi - lo;
  return {lhs, std::exp(n * t * t * width * width / 8.0)};
}

}  // namespace pacbound
