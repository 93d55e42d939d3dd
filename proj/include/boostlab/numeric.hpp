#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "boostlab/errors.hpp"

namespace boostlab {

// Kahan-compensated accumulator. Weights and divergences are summed with it
// so that 1e-10 identity tolerances remain attainable at m up to 1e6.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

inline double kahan_total(std::span<const double> xs) {
  KahanSum acc;
  for (const double x : xs) acc.add(x);
  return acc.value();
}

inline std::uint64_t next_pow2(std::uint64_t n) {
  std::uint64_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

inline bool is_pow2(std::uint64_t n) { return n != 0 && (n & (n - 1)) == 0; }

// ceil(a/b) with a small nudge so that values an ulp above an integer do not
// get rounded up a full step (e.g. 1/gamma for gamma = 0.1).
inline std::size_t nudged_ceil(double x) {
  return static_cast<std::size_t>(std::ceil(x - 1e-9));
}

inline std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

// Median of a scratch vector (upper median for even counts).
inline double median_inplace(std::vector<double>& xs) {
  std::sort(xs.begin(), xs.end());
  return xs[xs.size() / 2];
}

// Least-squares slope of y against x.
inline double fit_slope(std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = xs.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double cov = 0, var = 0;
  for (std::size_t i = 0; i < n; ++i) {
    cov += (xs[i] - mx) * (ys[i] - my);
    var += (xs[i] - mx) * (xs[i] - mx);
  }
  return cov / var;
}

inline double fit_loglog_slope(std::span<const double> xs, std::span<const double> ys) {
  std::vector<double> lx(xs.size()), ly(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  return fit_slope(lx, ly);
}

namespace detail {

// Regularized lower incomplete gamma P(a,x), series expansion.
inline double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a,x), continued fraction.
inline double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace detail

// Q(a,x) = 1 - P(a,x); survival function of the gamma distribution.
inline double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw Error("gamma_q: invalid arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
  return detail::gamma_q_cf(a, x);
}

// Upper tail p-value of a chi-square statistic with `dof` degrees of freedom.
inline double chi_square_pvalue(double stat, std::size_t dof) {
  return gamma_q(static_cast<double>(dof) / 2.0, stat / 2.0);
}

// Pearson statistic of observed counts against expected probabilities;
// bins with negligible expectation are skipped.
inline double chi_square_stat(std::span<const std::uint64_t> observed,
                              std::span<const double> expected_probs,
                              std::uint64_t draws, std::size_t* dof_out) {
  double stat = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double expected = expected_probs[i] * static_cast<double>(draws);
    if (expected < 1e-9) continue;
    const double diff = static_cast<double>(observed[i]) - expected;
    stat += diff * diff / expected;
    ++used;
  }
  if (dof_out) *dof_out = used > 1 ? used - 1 : 1;
  return stat;
}

}  // namespace boostlab
