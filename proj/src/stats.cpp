#include "dfpred/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dfpred/errors.hpp"

namespace dfpred {

namespace {

constexpr int kMaxIterations = 500;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;

// Series expansion of P(a, x), converges quickly for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int i = 0; i < kMaxIterations; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x), converges quickly for x >= a + 1.
// Modified Lentz algorithm.
double gamma_q_cf(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIterations; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for the incomplete beta function (Lentz).
double beta_cf(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double dm = static_cast<double>(m);
    const double m2 = 2.0 * dm;
    double aa = dm * (b - dm) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + dm) * (qab + dm) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (a <= 0) throw NumericError("regularized_gamma_p: a must be > 0");
  if (x < 0) throw NumericError("regularized_gamma_p: x must be >= 0");
  if (x == 0) return 0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double regularized_gamma_q(double a, double x) {
  if (a <= 0) throw NumericError("regularized_gamma_q: a must be > 0");
  if (x < 0) throw NumericError("regularized_gamma_q: x must be >= 0");
  if (x == 0) return 1;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double regularized_beta(double a, double b, double x) {
  if (a <= 0 || b <= 0) throw NumericError("regularized_beta: a, b must be > 0");
  if (x < 0 || x > 1) throw NumericError("regularized_beta: x must be in [0, 1]");
  if (x == 0) return 0;
  if (x == 1) return 1;
  const double front =
      std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
               b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double chi_squared_sf(double x, double df) {
  if (df <= 0) throw NumericError("chi_squared_sf: df must be > 0");
  if (x <= 0) return 1;
  return regularized_gamma_q(df / 2.0, x / 2.0);
}

double f_dist_sf(double x, double d1, double d2) {
  if (d1 <= 0 || d2 <= 0) throw NumericError("f_dist_sf: degrees of freedom must be > 0");
  if (x <= 0) return 1;
  if (std::isinf(x)) return 0;
  return regularized_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * x));
}

TestResult kruskal_wallis(std::span<const std::vector<double>> groups) {
  if (groups.size() < 2) throw DataError("kruskal_wallis requires at least 2 groups");
  std::size_t n_total = 0;
  for (const auto& g : groups) {
    if (g.empty()) throw DataError("kruskal_wallis: empty group");
    n_total += g.size();
  }
  if (n_total < 5) throw DataError("kruskal_wallis: total sample size must be >= 5");

  // Pool observations with group tags, rank with midranks for ties.
  std::vector<std::pair<double, std::size_t>> pooled;
  pooled.reserve(n_total);
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (double v : groups[g]) pooled.emplace_back(v, g);
  std::sort(pooled.begin(), pooled.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<double> rank_sum(groups.size(), 0);
  double tie_term = 0;  // sum of t^3 - t over tie runs
  const double n = static_cast<double>(n_total);
  std::size_t i = 0;
  while (i < pooled.size()) {
    std::size_t j = i;
    while (j < pooled.size() && pooled[j].first == pooled[i].first) ++j;
    const double t = static_cast<double>(j - i);
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) rank_sum[pooled[k].second] += midrank;
    tie_term += t * t * t - t;
    i = j;
  }

  TestResult result;
  result.df1 = static_cast<double>(groups.size() - 1);
  const double correction = 1.0 - tie_term / (n * n * n - n);
  if (correction <= 0) {
    // Every observation identical; the test is undefined.
    result.degenerate = true;
    result.statistic = 0;
    result.p_value = 1;
    return result;
  }
  double h = 0;
  for (std::size_t g = 0; g < groups.size(); ++g)
    h += rank_sum[g] * rank_sum[g] / static_cast<double>(groups[g].size());
  h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);
  h /= correction;
  result.statistic = h;
  result.p_value = chi_squared_sf(h, result.df1);
  return result;
}

TestResult one_way_anova(std::span<const std::vector<double>> groups) {
  if (groups.size() < 2) throw DataError("one_way_anova requires at least 2 groups");
  std::size_t n_total = 0;
  for (const auto& g : groups) {
    if (g.size() < 2) throw DataError("one_way_anova: every group needs >= 2 observations");
    n_total += g.size();
  }

  double grand_sum = 0;
  for (const auto& g : groups) grand_sum = std::accumulate(g.begin(), g.end(), grand_sum);
  const double grand_mean = grand_sum / static_cast<double>(n_total);

  double ss_between = 0;
  double ss_within = 0;
  for (const auto& g : groups) {
    const double m = std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
    ss_between += static_cast<double>(g.size()) * (m - grand_mean) * (m - grand_mean);
    for (double v : g) ss_within += (v - m) * (v - m);
  }

  TestResult result;
  result.df1 = static_cast<double>(groups.size() - 1);
  result.df2 = static_cast<double>(n_total - groups.size());
  if (ss_within == 0) {
    result.degenerate = true;
    if (ss_between == 0) {
      result.statistic = 0;
      result.p_value = 1;
    } else {
      result.statistic = std::numeric_limits<double>::infinity();
      result.p_value = 0;
    }
    return result;
  }
  const double ms_between = ss_between / result.df1;
  const double ms_within = ss_within / result.df2;
  result.statistic = ms_between / ms_within;
  result.p_value = f_dist_sf(result.statistic, result.df1, result.df2);
  return result;
}

}  // namespace dfpred
