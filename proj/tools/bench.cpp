// Compares the OpenMP kernels against their serial references: wall time,
// speedup, and an output-equality check (the kernels are bitwise
// deterministic for any thread count).
#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pacbound/scenario.hpp"
#include "pacbound/validation.hpp"

using namespace pacbound;

namespace {

double seconds(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

DiscreteScenario bench_scenario() {
  std::vector<ScenarioPoint> pts = {
      {0.30, 0.0, true},   {0.20, 0.05, false}, {0.15, 0.20, false},
      {0.12, 0.45, false}, {0.10, 0.70, false}, {0.08, 0.90, false},
      {0.05, 1.0, false},
  };
  return DiscreteScenario(std::move(pts), 1.0);
}

bool same_report(const CoverageReport& a, const CoverageReport& b) {
  return a.coverage == b.coverage && a.mean_bound == b.mean_bound &&
         a.mean_r_hat == b.mean_r_hat && a.trials == b.trials;
}

bool same_report(const ExactFailureReport& a, const ExactFailureReport& b) {
  return a.unconditional == b.unconditional &&
         a.outside_count_prob == b.outside_count_prob &&
         a.conditional_fail_by_k == b.conditional_fail_by_k;
}

}  // namespace

int main(int argc, char** argv) {
  std::int64_t trials = 20000;
  if (argc > 1) trials = std::atoll(argv[1]);

  const DiscreteScenario sc = bench_scenario();
#ifdef _OPENMP
  const int max_threads = omp_get_max_threads();
#else
  const int max_threads = 1;
#endif
  std::printf("threads available: %d\n", max_threads);
  std::printf("%-34s %10s %10s %8s %6s\n", "kernel", "serial[s]", "openmp[s]",
              "speedup", "match");

  {
    auto t0 = std::chrono::steady_clock::now();
    const CoverageReport ref =
        monte_carlo_coverage_serial(sc, 60, 0.05, Method::implicit, trials, 7);
    const double ts = seconds(t0);
    t0 = std::chrono::steady_clock::now();
    const CoverageReport par =
        monte_carlo_coverage(sc, 60, 0.05, Method::implicit, trials, 7);
    const double tp = seconds(t0);
    std::printf("%-34s %10.3f %10.3f %8.2f %6s\n",
                "monte_carlo_coverage (implicit)", ts, tp, ts / tp,
                same_report(ref, par) ? "yes" : "NO");
  }

  {
    auto t0 = std::chrono::steady_clock::now();
    const CoverageReport ref = monte_carlo_coverage_serial(
        sc, 60, 0.05, Method::closed_form, 10 * trials, 7);
    const double ts = seconds(t0);
    t0 = std::chrono::steady_clock::now();
    const CoverageReport par =
        monte_carlo_coverage(sc, 60, 0.05, Method::closed_form, 10 * trials, 7);
    const double tp = seconds(t0);
    std::printf("%-34s %10.3f %10.3f %8.2f %6s\n",
                "monte_carlo_coverage (closed)", ts, tp, ts / tp,
                same_report(ref, par) ? "yes" : "NO");
  }

  {
    // 7^8 ~ 5.8e6 raw sequences
#ifdef _OPENMP
    omp_set_num_threads(1);
#endif
    auto t0 = std::chrono::steady_clock::now();
    const ExactFailureReport ref = exact_failure_probability_sequences(sc, 8, 0.1);
    const double ts = seconds(t0);
#ifdef _OPENMP
    omp_set_num_threads(max_threads);
#endif
    t0 = std::chrono::steady_clock::now();
    const ExactFailureReport par = exact_failure_probability_sequences(sc, 8, 0.1);
    const double tp = seconds(t0);
    std::printf("%-34s %10.3f %10.3f %8.2f %6s\n",
                "exact enumeration (sequences)", ts, tp, ts / tp,
                same_report(ref, par) ? "yes" : "NO");
  }
  return 0;
}
