#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pacbound/region.hpp"

using namespace pacbound;

namespace {
RiskQuery table_query() {
  RiskQuery q;
  q.m = 100;
  q.delta = 0.05;
  q.loss_range = 1.0;
  q.r_hat = 0.05;
  return q;
}
}  // namespace

TEST_CASE("estimate_pdelta") {
  CHECK(estimate_pdelta({100, 0}) == 0.0);
  CHECK(estimate_pdelta({100, 100}) == 1.0);
  CHECK(estimate_pdelta({200, 37}) == 0.185);
  CHECK_THROWS_AS(estimate_pdelta({0, 0}), std::domain_error);
  CHECK_THROWS_AS(estimate_pdelta({10, 11}), std::domain_error);
  CHECK_THROWS_AS(estimate_pdelta({10, -1}), std::domain_error);
}

TEST_CASE("clopper_pearson_lower edge and reference values") {
  CHECK(clopper_pearson_lower({50, 0}, 0.05) == 0.0);
  // Beta(50,1) CDF is x^50, so the quantile is alpha^{1/50}
  CHECK(clopper_pearson_lower({50, 50}, 0.05) ==
        doctest::Approx(std::pow(0.05, 1.0 / 50.0)).epsilon(1e-10));
  CHECK(clopper_pearson_lower({50, 50}, 0.05) ==
        doctest::Approx(0.94184492088302773).epsilon(1e-10));
  CHECK_THROWS_AS(clopper_pearson_lower({50, 5}, 0.0), std::domain_error);
  CHECK_THROWS_AS(clopper_pearson_lower({50, 5}, 1.0), std::domain_error);
}

TEST_CASE("clopper_pearson_lower against the quadrature-CDF oracle") {
  const double via_oracle = oracles::bisect_decreasing(
      [](double x) { return 0.05 - oracles::beta_cdf_quadrature(x, 10, 91); },
      0.0, 1.0);
  CHECK(clopper_pearson_lower({100, 10}, 0.05) ==
        doctest::Approx(via_oracle).epsilon(1e-9));
  CHECK(clopper_pearson_lower({100, 10}, 0.05) ==
        doctest::Approx(0.055263237682870024).epsilon(1e-10));
}

TEST_CASE("clopper_pearson_lower sits below the point estimate") {
  for (const std::int64_t m_a : {5, 20, 50, 200})
    for (std::int64_t hits = 0; hits <= m_a; hits += std::max<std::int64_t>(1, m_a / 7))
      for (const double alpha : {0.01, 0.1, 0.5}) {
        const MembershipSample ms{m_a, hits};
        CHECK(clopper_pearson_lower(ms, alpha) <= estimate_pdelta(ms) + 1e-12);
      }
}

TEST_CASE("clopper_pearson_lower monotonicity grid") {
  // increasing in hits
  double prev = -1.0;
  for (std::int64_t hits = 0; hits <= 40; hits += 4) {
    const double v = clopper_pearson_lower({40, hits}, 0.05);
    CHECK(v >= prev);
    prev = v;
  }
  // increasing in alpha
  prev = -1.0;
  for (const double alpha : {0.01, 0.05, 0.1, 0.25, 0.5}) {
    const double v = clopper_pearson_lower({40, 10}, alpha);
    CHECK(v > prev);
    prev = v;
  }
  // increasing in m_a at fixed p_hat
  prev = -1.0;
  for (const std::int64_t scale : {1, 2, 5, 10, 25}) {
    const double v = clopper_pearson_lower({20 * scale, 5 * scale}, 0.05);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("clopper_pearson_lower exact coverage by binomial enumeration") {
  // P(p_lower <= p) >= 1 - alpha for every true p, computed without sampling
  for (const std::int64_t m_a : {10, 17, 30})
    for (const double alpha : {0.05, 0.2}) {
      std::vector<double> lower(static_cast<std::size_t>(m_a) + 1);
      for (std::int64_t h = 0; h <= m_a; ++h)
        lower[static_cast<std::size_t>(h)] =
            clopper_pearson_lower({m_a, h}, alpha);
      for (int i = 1; i <= 99; i += 7) {
        const double p = static_cast<double>(i) / 100.0;
        double covered = 0.0;
        for (std::int64_t h = 0; h <= m_a; ++h) {
          if (lower[static_cast<std::size_t>(h)] <= p)
            covered += oracles::exact_binomial(static_cast<int>(m_a),
                                               static_cast<int>(h)) *
                       std::pow(p, static_cast<double>(h)) *
                       std::pow(1.0 - p, static_cast<double>(m_a - h));
        }
        CHECK(covered >= 1.0 - alpha - 1e-12);
      }
    }
}

TEST_CASE("combined_confidence") {
  CHECK(combined_confidence(0.05, 0.01) == doctest::Approx(0.0595).epsilon(1e-15));
  CHECK(combined_confidence(0.05, 0.0) == 0.05);
  CHECK(combined_confidence(0.0, 0.01) == 0.01);
  CHECK_THROWS_AS(combined_confidence(1.0, 0.01), std::domain_error);
  CHECK_THROWS_AS(combined_confidence(0.05, -0.1), std::domain_error);
}

TEST_CASE("bound_with_estimated_region with no hits matches the classical bound") {
  const RiskQuery q = table_query();
  RiskQuery base = q;
  base.hypothesis_count = 1;
  const double classical = hoeffding_bound(base).bound;
  for (const Method method : {Method::implicit, Method::closed_form}) {
    const BoundResult r = bound_with_estimated_region(q, {50, 0}, 0.01, method);
    CHECK(std::fabs(r.bound - classical) <= 1e-12);
    CHECK(r.confidence ==
          doctest::Approx(1.0 - combined_confidence(q.delta, 0.01)));
    CHECK(r.diagnostics.p_lower == 0.0);
    CHECK(r.diagnostics.p_hat == 0.0);
  }
}

TEST_CASE("bound_with_estimated_region is monotone in alpha") {
  const RiskQuery q = table_query();
  const MembershipSample ms{500, 150};
  double prev_p = 2.0;
  double prev_bound = -1.0;
  for (const double alpha : {0.2, 0.1, 0.05, 0.01, 0.001}) {
    const BoundResult r =
        bound_with_estimated_region(q, ms, alpha, Method::closed_form);
    CHECK(r.diagnostics.p_lower < prev_p);   // smaller alpha, smaller p_lower
    CHECK(r.bound > prev_bound);             // and a looser bound
    prev_p = r.diagnostics.p_lower;
    prev_bound = r.bound;
  }
}

TEST_CASE("bound_with_estimated_region end-to-end against composed oracles") {
  const RiskQuery q = table_query();
  const BoundResult r =
      bound_with_estimated_region(q, {1000, 250}, 0.01, Method::closed_form);
  // p_lower via quadrature CDF + bisection, then the closed form via the
  // pre-rearrangement equation
  const double p_low = oracles::bisect_decreasing(
      [](double x) { return 0.01 - oracles::beta_cdf_quadrature(x, 250, 751); },
      0.0, 1.0);
  const double bound_oracle = oracles::bisect_decreasing(
      [&](double s) {
        return std::exp(-4.0 * 100.0 * s * s) *
                   std::pow(p_low + (1.0 - p_low) * std::exp(2.0 * s * s),
                            100.0) -
               0.05;
      },
      0.0, 1.0);
  CHECK(r.diagnostics.p_lower == doctest::Approx(p_low).epsilon(1e-7));
  CHECK(r.bound == doctest::Approx(bound_oracle).epsilon(1e-7));
  CHECK(r.bound < 0.12238734153404083);  // strictly below the classical bound
  CHECK(r.confidence == doctest::Approx(1.0 - 0.0595));
  CHECK(r.diagnostics.p_hat == doctest::Approx(0.25));
}

TEST_CASE("bound_with_estimated_region rejects the classic method") {
  CHECK_THROWS_AS(
      bound_with_estimated_region(table_query(), {10, 5}, 0.05, Method::classic),
      std::domain_error);
}
