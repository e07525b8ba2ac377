#pragma once

// Small statistical toolbox for the test suite: tail probabilities for the
// chi-squared and Kolmogorov distributions plus a two-sided Mann-Whitney
// test.  Implemented from the standard series / continued-fraction
// expansions; accuracy here only needs to support pass/fail decisions at
// p ~ 1e-2 .. 1e-4, far below what these expansions deliver.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace stattest {

namespace detail {

// Regularized lower incomplete gamma P(a, x) by series expansion (x < a+1).
inline double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by Lentz continued fraction
// (x >= a+1).
inline double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace detail

// P(Chi2_df > x).
inline double chi2_sf(double x, double df) {
  if (x < 0.0 || df <= 0.0) throw std::invalid_argument("chi2_sf: bad args");
  if (x == 0.0) return 1.0;
  const double a = 0.5 * df;
  const double half = 0.5 * x;
  if (half < a + 1.0) return 1.0 - detail::gamma_p_series(a, half);
  return detail::gamma_q_cf(a, half);
}

// Pearson chi-squared test: observed counts vs expected counts (same length,
// expected all positive).  Returns the p-value.
inline double chi2_test(const std::vector<double>& observed,
                        const std::vector<double>& expected) {
  if (observed.size() != expected.size() || observed.empty())
    throw std::invalid_argument("chi2_test: size mismatch");
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0.0) throw std::invalid_argument("chi2_test: expected <= 0");
    const double d = observed[i] - expected[i];
    stat += d * d / expected[i];
  }
  return chi2_sf(stat, static_cast<double>(observed.size() - 1));
}

// Kolmogorov distribution tail Q_KS(t) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 t^2).
inline double kolmogorov_sf(double t) {
  if (t <= 0.0) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * t * t);
    sum += (j % 2 == 1) ? term : -term;
    if (term < 1e-16) break;
  }
  return std::min(1.0, std::max(0.0, 2.0 * sum));
}

// Two-sample Kolmogorov-Smirnov p-value (asymptotic with the usual small-n
// correction).  Samples are copied and sorted internally.
inline double ks2_pvalue(std::vector<double> a, std::vector<double> b) {
  if (a.size() < 8 || b.size() < 8)
    throw std::invalid_argument("ks2_pvalue: samples too small");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t ia = 0;
  std::size_t ib = 0;
  while (ia < a.size() && ib < b.size()) {
    if (a[ia] <= b[ib])
      ++ia;
    else
      ++ib;
    d = std::max(d, std::abs(ia / na - ib / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return kolmogorov_sf((ne + 0.12 + 0.11 / ne) * d);
}

// Two-sided Mann-Whitney U test with tie correction, normal approximation.
inline double mann_whitney_p(const std::vector<double>& a,
                             const std::vector<double>& b) {
  if (a.size() < 8 || b.size() < 8)
    throw std::invalid_argument("mann_whitney_p: samples too small");
  struct Tagged {
    double v;
    int side;
  };
  std::vector<Tagged> all;
  all.reserve(a.size() + b.size());
  for (double v : a) all.push_back({v, 0});
  for (double v : b) all.push_back({v, 1});
  std::sort(all.begin(), all.end(),
            [](const Tagged& x, const Tagged& y) { return x.v < y.v; });
  const double n = static_cast<double>(all.size());
  double rank_sum_a = 0.0;
  double tie_term = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j < all.size() && all[j].v == all[i].v) ++j;
    const double mid_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    const double t = static_cast<double>(j - i);
    if (t > 1.0) tie_term += t * (t * t - 1.0);
    for (std::size_t m = i; m < j; ++m)
      if (all[m].side == 0) rank_sum_a += mid_rank;
    i = j;
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double u = rank_sum_a - na * (na + 1.0) / 2.0;
  const double mu = na * nb / 2.0;
  const double var =
      na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (var <= 0.0) return 1.0;  // all values tied
  const double z = (u - mu) / std::sqrt(var);
  return std::erfc(std::abs(z) / std::sqrt(2.0));
}

// Wilson score interval for a binomial proportion (95%).
struct Interval {
  double lo;
  double hi;
};

inline Interval wilson95(double hits, double n) {
  const double z = 1.959963984540054;
  const double p = hits / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

}  // namespace stattest
