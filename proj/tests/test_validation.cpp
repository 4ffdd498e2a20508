#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pacbound/conditioned.hpp"
#include "pacbound/validation.hpp"

using namespace pacbound;

namespace {

DiscreteScenario mixed3() {
  return DiscreteScenario({{0.25, 0.0, true}, {0.40, 0.3, false},
                           {0.35, 0.8, false}},
                          1.0);
}

DiscreteScenario random_scenario(std::mt19937& rng) {
  std::uniform_int_distribution<int> n_points(2, 5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = n_points(rng);
  const int n_in = std::uniform_int_distribution<int>(0, n - 1)(rng);
  std::vector<ScenarioPoint> pts(static_cast<std::size_t>(n));
  double total = 0.0;
  for (auto& pt : pts) {
    pt.mass = unit(rng) + 0.05;
    total += pt.mass;
  }
  for (auto& pt : pts) pt.mass /= total;
  // rounding: pin the exact-sum invariant
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) acc += pts[i].mass;
  pts.back().mass = 1.0 - acc;
  for (int i = 0; i < n; ++i) {
    pts[static_cast<std::size_t>(i)].in_region = i < n_in;
    pts[static_cast<std::size_t>(i)].loss = i < n_in ? 0.0 : unit(rng);
  }
  return DiscreteScenario(std::move(pts), 1.0);
}

}  // namespace

TEST_CASE("exact_failure_probability trivial scenarios") {
  const DiscreteScenario lossless({{1.0, 0.0, false}}, 1.0);
  for (const double s : {0.0, 0.1}) {
    const auto rep = exact_failure_probability(lossless, 3, s);
    CHECK(rep.unconditional == 0.0);
    CHECK(rep.conditional == 0.0);
  }
  // equal losses everywhere: R == r_hat always
  const DiscreteScenario flat({{0.5, 0.4, false}, {0.5, 0.4, false}}, 1.0);
  const auto rep = exact_failure_probability(flat, 4, 0.0);
  CHECK(rep.unconditional == 0.0);
}

TEST_CASE("multiset and sequence enumerations agree") {
  std::mt19937 rng(99);
  for (int rep = 0; rep < 10; ++rep) {
    const DiscreteScenario sc = random_scenario(rng);
    const int m = 1 + static_cast<int>(rng() % 6);
    const double s = 0.25 * std::uniform_real_distribution<double>(0, 1)(rng);
    const auto a = exact_failure_probability(sc, m, s);
    const auto b = exact_failure_probability_sequences(sc, m, s);
    CHECK(a.unconditional == doctest::Approx(b.unconditional).epsilon(1e-13));
    REQUIRE(a.outside_count_prob.size() == b.outside_count_prob.size());
    for (std::size_t k = 0; k < a.outside_count_prob.size(); ++k) {
      CHECK(a.outside_count_prob[k] ==
            doctest::Approx(b.outside_count_prob[k]).epsilon(1e-12));
      CHECK(a.conditional_fail_by_k[k] ==
            doctest::Approx(b.conditional_fail_by_k[k]).epsilon(1e-12));
    }
  }
}

TEST_CASE("outside-count probabilities follow the binomial law") {
  std::mt19937 rng(123);
  for (int rep = 0; rep < 10; ++rep) {
    const DiscreteScenario sc = random_scenario(rng);
    const int m = 2 + static_cast<int>(rng() % 5);
    const double p = sc.region_mass();
    const auto report = exact_failure_probability(sc, m, 0.05);
    double total = 0.0;
    for (int k = 0; k <= m; ++k) {
      const double want = oracles::exact_binomial(m, k) *
                          std::pow(p, static_cast<double>(m - k)) *
                          std::pow(1.0 - p, static_cast<double>(k));
      CHECK(report.outside_count_prob[static_cast<std::size_t>(k)] ==
            doctest::Approx(want).epsilon(1e-12));
      total += report.outside_count_prob[static_cast<std::size_t>(k)];
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("exact enumeration cross-checked by direct Monte Carlo") {
  const DiscreteScenario sc = mixed3();
  const int m = 4;
  const double s = 0.1;
  const auto exact = exact_failure_probability(sc, m, s);

  std::mt19937 rng(4242);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int trials = 1000000;
  int fails = 0;
  for (int t = 0; t < trials; ++t) {
    double loss_sum = 0.0;
    for (int i = 0; i < m; ++i)
      loss_sum += sc.points()[sc.sample_index(unit(rng))].loss;
    if (sc.true_risk() > loss_sum / m + s) ++fails;
  }
  const double estimate = static_cast<double>(fails) / trials;
  const double sigma =
      std::sqrt(exact.unconditional * (1.0 - exact.unconditional) / trials);
  CHECK(std::fabs(estimate - exact.unconditional) <= 3.0 * sigma);
}

TEST_CASE("enumeration budget guard") {
  std::vector<ScenarioPoint> many;
  for (int i = 0; i < 10; ++i) many.push_back({0.1, 0.0, false});
  const DiscreteScenario sc(std::move(many), 1.0);
  CHECK_THROWS_AS(exact_failure_probability_sequences(sc, 8, 0.1),
                  std::domain_error);
  CHECK_THROWS_AS(exact_failure_probability(sc, 25, 0.1), std::domain_error);
}

TEST_CASE("exact_coverage keeps the failure mass under delta") {
  std::mt19937 rng(7);
  for (int rep = 0; rep < 5; ++rep) {
    const DiscreteScenario sc = random_scenario(rng);
    const int m = 2 + static_cast<int>(rng() % 5);
    for (const Method method :
         {Method::classic, Method::implicit, Method::closed_form}) {
      const auto report = exact_coverage(sc, m, 0.05, method);
      CHECK(report.failure_mass <= 0.05);
      CHECK(report.coverage == doctest::Approx(1.0 - report.failure_mass));
      CHECK(report.mean_bound > 0.0);
    }
  }
}

TEST_CASE("monte_carlo_coverage determinism and serial equivalence") {
  const DiscreteScenario sc = mixed3();
  const auto a = monte_carlo_coverage(sc, 40, 0.05, Method::implicit, 3000, 17);
  const auto b = monte_carlo_coverage(sc, 40, 0.05, Method::implicit, 3000, 17);
  CHECK(a.coverage == b.coverage);
  CHECK(a.mean_bound == b.mean_bound);
  CHECK(a.mean_r_hat == b.mean_r_hat);

  const auto serial =
      monte_carlo_coverage_serial(sc, 40, 0.05, Method::implicit, 3000, 17);
  CHECK(a.coverage == serial.coverage);
  CHECK(a.mean_bound == serial.mean_bound);
  CHECK(a.mean_r_hat == serial.mean_r_hat);

  const auto other_seed =
      monte_carlo_coverage(sc, 40, 0.05, Method::implicit, 3000, 18);
  CHECK(a.coverage != other_seed.coverage);
}

TEST_CASE("monte_carlo_coverage on a risk-free scenario") {
  const DiscreteScenario safe({{0.6, 0.0, true}, {0.4, 0.0, false}}, 1.0);
  const auto rep = monte_carlo_coverage(safe, 20, 0.05, Method::classic, 500, 1);
  CHECK(rep.coverage == 1.0);
}

TEST_CASE("monte_carlo_coverage meets the classical guarantee") {
  const DiscreteScenario sc = mixed3();
  const double sigma = std::sqrt(0.05 * 0.95 / 10000.0);
  const auto classic =
      monte_carlo_coverage(sc, 60, 0.05, Method::classic, 10000, 5);
  CHECK(classic.coverage >= 0.95 - 3.0 * sigma);
  const auto closed =
      monte_carlo_coverage(sc, 60, 0.05, Method::closed_form, 10000, 5);
  CHECK(closed.coverage >= 0.95 - 3.0 * sigma);
  // conditioning on a quarter of the mass tightens the average bound
  CHECK(closed.mean_bound < classic.mean_bound);
}

TEST_CASE("monte_carlo_coverage argument validation") {
  const DiscreteScenario sc = mixed3();
  CHECK_THROWS_AS(monte_carlo_coverage(sc, 0, 0.05, Method::classic, 10, 0),
                  std::domain_error);
  CHECK_THROWS_AS(monte_carlo_coverage(sc, 5, 0.0, Method::classic, 10, 0),
                  std::domain_error);
  CHECK_THROWS_AS(monte_carlo_coverage(sc, 5, 0.05, Method::classic, 0, 0),
                  std::domain_error);
}

TEST_CASE("hoeffding_lemma_check degenerate and coin cases") {
  const SupportPoint point_mass[] = {{0.7, 1.0}};
  const auto degenerate =
      hoeffding_lemma_check(std::span<const SupportPoint>(point_mass, 1), 3, 2.0);
  CHECK(degenerate.lhs == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(degenerate.lhs <= degenerate.rhs);

  // centered Bernoulli(1/2): E exp(t(U - 1/2)) = cosh(t/2)
  const SupportPoint coin[] = {{0.0, 0.5}, {1.0, 0.5}};
  const auto near_tight =
      hoeffding_lemma_check(std::span<const SupportPoint>(coin, 2), 1, 1.0);
  CHECK(near_tight.lhs == doctest::Approx(1.1276259652063808).epsilon(1e-12));
  CHECK(near_tight.rhs == doctest::Approx(1.1331484530668263).epsilon(1e-12));
  CHECK(near_tight.lhs <= near_tight.rhs);
}

TEST_CASE("hoeffding_lemma_check enumeration equals the tensorised MGF") {
  const SupportPoint support[] = {{-0.4, 0.3}, {0.1, 0.5}, {0.9, 0.2}};
  const std::span<const SupportPoint> sp(support, 3);
  const double mean = -0.4 * 0.3 + 0.1 * 0.5 + 0.9 * 0.2;
  for (const int n : {1, 2, 4}) {
    for (const double t : {0.3, 1.7}) {
      double single = 0.0;
      for (const auto& pt : sp) single += pt.mass * std::exp(t * (pt.value - mean));
      const auto check = hoeffding_lemma_check(sp, n, t);
      CHECK(check.lhs ==
            doctest::Approx(std::pow(single, n)).epsilon(1e-12));
      CHECK(check.lhs <= check.rhs);
    }
  }
}

TEST_CASE("hoeffding_lemma_check random sweep") {
  std::mt19937 rng(31337);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int rep = 0; rep < 1000; ++rep) {
    const int size = 2 + static_cast<int>(rng() % 4);
    std::vector<SupportPoint> support(static_cast<std::size_t>(size));
    double total = 0.0;
    const double a = -2.0 + 4.0 * unit(rng);
    const double width = 0.2 + 2.0 * unit(rng);
    for (auto& pt : support) {
      pt.value = a + width * unit(rng);
      pt.mass = unit(rng) + 0.05;
      total += pt.mass;
    }
    for (auto& pt : support) pt.mass /= total;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < support.size(); ++i) acc += support[i].mass;
    support.back().mass = 1.0 - acc;
    const int n = 1 + static_cast<int>(rng() % 5);
    const double t = 0.01 + 9.99 * unit(rng);
    const auto check = hoeffding_lemma_check(support, n, t);
    CHECK(check.lhs <= check.rhs * (1.0 + 1e-12));
  }
}

TEST_CASE("hoeffding_lemma_check argument validation") {
  const SupportPoint coin[] = {{0.0, 0.5}, {1.0, 0.5}};
  const std::span<const SupportPoint> sp(coin, 2);
  CHECK_THROWS_AS(hoeffding_lemma_check(sp, 0, 1.0), std::domain_error);
  CHECK_THROWS_AS(hoeffding_lemma_check(sp, 1, 0.0), std::domain_error);
  CHECK_THROWS_AS(hoeffding_lemma_check(sp, 40, 1.0), std::domain_error);
  const SupportPoint bad[] = {{0.0, 0.5}, {1.0, 0.6}};
  CHECK_THROWS_AS(
      hoeffding_lemma_check(std::span<const SupportPoint>(bad, 2), 1, 1.0),
      std::domain_error);
}

TEST_CASE("derive_stream_seed decorrelates neighbouring counters") {
  const std::uint64_t a = derive_stream_seed(0, 0);
  const std::uint64_t b = derive_stream_seed(0, 1);
  const std::uint64_t c = derive_stream_seed(1, 0);
  CHECK(a != b);
  CHECK(a != c);
  // streams from adjacent counters should not share prefixes
  SplitMix64 ra(a);
  SplitMix64 rb(b);
  int agree = 0;
  for (int i = 0; i < 64; ++i)
    if (ra.next() == rb.next()) ++agree;
  CHECK(agree == 0);
}
