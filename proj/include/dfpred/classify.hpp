#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dfpred/stats.hpp"
#include "dfpred/types.hpp"

namespace dfpred {

enum class SpeedLabel { LikelyFast, LikelySlow, Indeterminate };
enum class ClassifyRule { Majority, AllThree };

ClassifyRule rule_from_string(std::string_view s);
std::string_view to_string(ClassifyRule r);
std::string_view to_string(SpeedLabel l);

/// Default scheduler-advisory counters.
const std::vector<std::string>& default_speed_features();

struct SpeedLabeling {
  std::vector<std::string> feature_names;
  Vector medians;  // dataset median per feature
  std::vector<SpeedLabel> labels;
};

/// Median-threshold fast/slow classification. Each feature votes slow when
/// the job's value is strictly above the dataset median (values at the
/// median count as below). Majority labels every job; AllThree labels only
/// unanimous jobs and marks the rest indeterminate.
SpeedLabeling classify_fast_slow(const Matrix& features,
                                 std::span<const std::string> feature_names, ClassifyRule rule);

struct FastSlowReport {
  Index n_fast = 0;
  Index n_slow = 0;
  double mean_fast = 0;
  double mean_slow = 0;
  TestResult kruskal_wallis;
  TestResult anova;
};

/// Mean runtimes per label plus the two significance tests between the fast
/// and slow runtime groups. Throws DataError if either label is empty.
FastSlowReport fast_slow_report(const SpeedLabeling& labeling, ConstVectorRef runtimes);

}  // namespace dfpred
