#include "pacbound/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace pacbound {

namespace {

// Continued fraction for I_x(a,b), modified Lentz method.
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  const double eps = std::numeric_limits<double>::epsilon();
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const int i2 = 2 * i;
    double aa = i * (b - i) * x / ((qam + i2) * (a + i2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + i) * (qab + i) * x / ((a + i2) * (qap + i2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) return h;
  }
  throw SolverError("reg_inc_beta: continued fraction did not converge",
                    std::fabs(h));
}

}  // namespace

void SolverConfig::validate() const {
  if (!(abs_tol > 0.0))
    throw std::domain_error("SolverConfig: abs_tol must be > 0");
  if (max_iter < 1)
    throw std::domain_error("SolverConfig: max_iter must be >= 1");
  if (!(bracket_lo < bracket_hi))
    throw std::domain_error("SolverConfig: bracket_lo must be < bracket_hi");
}

double log_binomial(std::int64_t n, std::int64_t k) {
  if (n < 0 || k < 0 || k > n)
    throw std::domain_error("log_binomial: require 0 <= k <= n");
  // Canonical k keeps log_binomial(n,k) == log_binomial(n,n-k) bitwise.
  const std::int64_t kk = std::min(k, n - k);
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(kk) + 1.0) -
         std::lgamma(static_cast<double>(n - kk) + 1.0);
}

double log_sum_exp(std::span<const double> terms) {
  if (terms.empty())
    throw std::domain_error("log_sum_exp: empty term list");
  // Sorting fixes the summation order (permutation invariance) and adds the
  // small terms first.
  std::vector<double> sorted(terms.begin(), terms.end());
  std::sort(sorted.begin(), sorted.end());
  const double peak = sorted.back();
  if (!std::isfinite(peak)) return peak;  // all -inf, or +inf dominates
  double sum = 0.0;
  for (const double t : sorted) sum += std::exp(t - peak);
  return peak + std::log(sum);
}

double reg_inc_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::domain_error("reg_inc_beta: shape parameters must be > 0");
  if (!(x >= 0.0 && x <= 1.0))
    throw std::domain_error("reg_inc_beta: x must lie in [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double ln_prefactor = std::lgamma(a + b) - std::lgamma(a) -
                              std::lgamma(b) + a * std::log(x) +
                              b * std::log1p(-x);
  const double prefactor = std::exp(ln_prefactor);
  if (x < (a + 1.0) / (a + b + 2.0))
    return prefactor * beta_cf(a, b, x) / a;
  return 1.0 - prefactor * beta_cf(b, a, 1.0 - x) / b;
}

double beta_quantile(double q, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::domain_error("beta_quantile: shape parameters must be > 0");
  if (!(q > 0.0 && q < 1.0))
    throw std::domain_error("beta_quantile: q must lie in (0,1)");
  SolverConfig cfg;
  cfg.abs_tol = 1e-15;
  cfg.bracket_lo = 0.0;
  cfg.bracket_hi = 1.0;
  const RootResult r = solve_monotone_decreasing(
      [&](double x) { return q - reg_inc_beta(x, a, b); }, cfg);
  const double residual = std::fabs(reg_inc_beta(r.root, a, b) - q);
  if (residual > 1e-10)
    throw SolverError("beta_quantile: residual above tolerance", residual);
  return r.root;
}

RootResult solve_monotone_decreasing(const std::function<double(double)>& f,
                                     const SolverConfig& cfg) {
  cfg.validate();
  const auto eval = [&](double x) {
    const double v = f(x);
    if (std::isnan(v) || std::isinf(v))
      throw SolverError("solve_monotone_decreasing: non-finite evaluation", v);
    return v;
  };

  double lo = cfg.bracket_lo;
  double hi = cfg.bracket_hi;
  double flo = eval(lo);
  double fhi = eval(hi);
  if (flo < 0.0) return {lo, 0, flo, true};
  if (fhi > 0.0) return {hi, 0, fhi, true};

  int iter = 0;
  bool stalled = false;
  while (iter < cfg.max_iter && (hi - lo) > cfg.abs_tol) {
    double mid = 0.5 * (lo + hi);
    if (cfg.secant && (iter % 2) == 1 && flo > fhi) {
      // False-position step, kept strictly interior so the bracket shrinks.
      const double margin = 0.01 * (hi - lo);
      const double t = lo + (hi - lo) * flo / (flo - fhi);
      mid = std::clamp(t, lo + margin, hi - margin);
    }
    if (!(mid > lo && mid < hi)) {
      stalled = true;  // bracket at floating-point resolution
      break;
    }
    const double fm = eval(mid);
    ++iter;
    if (fm >= 0.0) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  if (!stalled && (hi - lo) > cfg.abs_tol)
    throw SolverError(
        "solve_monotone_decreasing: max_iter reached before abs_tol", flo);
  const double root = 0.5 * (lo + hi);
  return {root, iter, eval(root), false};
}

}  // namespace pacbound
