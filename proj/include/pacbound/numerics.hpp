// numerics.hpp — stable special functions and a monotone root finder.
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>

namespace pacbound {

// Thrown when a solver cannot meet its contract; carries the last residual.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

struct SolverConfig {
  double abs_tol = 1e-12;  // absolute tolerance on the root location
  int max_iter = 200;      // 200 bisections out-resolve any unit bracket
  double bracket_lo = 0.0;
  double bracket_hi = 1.0;
  bool secant = false;     // optional false-position acceleration

  void validate() const;
};

struct RootResult {
  double root = 0.0;
  int iterations = 0;
  double residual = 0.0;
  bool clamped = false;
};

// ln C(n,k) via log-gamma; bitwise symmetric under k <-> n-k.
double log_binomial(std::int64_t n, std::int64_t k);

// ln sum exp(t_i) with the max-shift trick. -inf entries denote zero terms;
// the summation order is canonical, so the result is permutation-invariant.
double log_sum_exp(std::span<const double> terms);

// Regularized incomplete beta I_x(a,b): modified Lentz continued fraction
// with the symmetry switch I_x(a,b) = 1 - I_{1-x}(b,a) at x = (a+1)/(a+b+2).
double reg_inc_beta(double x, double a, double b);

// x with |I_x(a,b) - q| <= 1e-10, found by bracketed bisection on the CDF.
double beta_quantile(double q, double a, double b);

// Root of a continuous non-increasing f on [bracket_lo, bracket_hi].
// f(lo) < 0 returns lo, f(hi) > 0 returns hi, both with the clamped flag set.
RootResult solve_monotone_decreasing(const std::function<double(double)>& f,
                                     const SolverConfig& cfg);

}  // namespace pacbound
