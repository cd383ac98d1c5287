#pragma once

#include <span>
#include <vector>

#include "dfpred/types.hpp"

namespace dfpred {

// Regularized incomplete gamma and beta functions, series/continued-fraction
// implementations accurate to ~1e-12 in double precision.

/// P(a, x) = gamma(a, x) / Gamma(a), lower regularized incomplete gamma.
double regularized_gamma_p(double a, double x);

/// Q(a, x) = 1 - P(a, x).
double regularized_gamma_q(double a, double x);

/// I_x(a, b), regularized incomplete beta.
double regularized_beta(double a, double b, double x);

/// Survival function of the chi-square distribution with df degrees of freedom.
double chi_squared_sf(double x, double df);

/// Survival function of the F distribution with (d1, d2) degrees of freedom.
double f_dist_sf(double x, double d1, double d2);

struct TestResult {
  double statistic = 0;  // H or F
  double df1 = 0;        // k-1 for both tests
  double df2 = 0;        // N-k for ANOVA, 0 for Kruskal-Wallis
  double p_value = 1;
  bool degenerate = false;  // all observations identical / zero within-group variance
};

/// Kruskal-Wallis H test with the standard tie correction. p-value from the
/// chi-square approximation with k-1 degrees of freedom. Requires every group
/// nonempty and total n >= 5. All-identical observations report H=0, p=1.
TestResult kruskal_wallis(std::span<const std::vector<double>> groups);

/// One-way ANOVA. Requires every group to have >= 2 observations. Zero
/// within-group variance reports F=inf, p=0 (or F=0, p=1 when the group
/// means are also all equal).
TestResult one_way_anova(std::span<const std::vector<double>> groups);

}  // namespace dfpred
