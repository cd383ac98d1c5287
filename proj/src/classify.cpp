#include "dfpred/classify.hpp"

#include <array>

#include "dfpred/errors.hpp"
#include "dfpred/features.hpp"

namespace dfpred {

ClassifyRule rule_from_string(std::string_view s) {
  if (s == "majority") return ClassifyRule::Majority;
  if (s == "all_three" || s == "all") return ClassifyRule::AllThree;
  throw UsageError("unknown classification rule: " + std::string(s));
}

std::string_view to_string(ClassifyRule r) {
  return r == ClassifyRule::Majority ? "majority" : "all_three";
}

std::string_view to_string(SpeedLabel l) {
  switch (l) {
    case SpeedLabel::LikelyFast: return "likely_fast";
    case SpeedLabel::LikelySlow: return "likely_slow";
    case SpeedLabel::Indeterminate: return "indeterminate";
  }
  return "?";
}

const std::vector<std::string>& default_speed_features() {
  static const std::vector<std::string> features = {"NUM_GROUPS", "RT_STL_COL", "RT_STL_GBL"};
  return features;
}

SpeedLabeling classify_fast_slow(const Matrix& features,
                                 std::span<const std::string> feature_names, ClassifyRule rule) {
  if (feature_names.empty()) throw UsageError("classify_fast_slow: no features given");
  if (features.cols() != static_cast<Index>(feature_names.size()))
    throw DataError("classify_fast_slow: column count does not match feature names");
  if (features.rows() < 2) throw DataError("classify_fast_slow: needs at least 2 jobs");

  SpeedLabeling out;
  out.feature_names.assign(feature_names.begin(), feature_names.end());
  out.medians.resize(features.cols());
  for (Index j = 0; j < features.cols(); ++j) out.medians[j] = percentile(features.col(j), 0.5);

  out.labels.resize(features.rows());
  const Index k = features.cols();
  for (Index i = 0; i < features.rows(); ++i) {
    Index slow_votes = 0;
    for (Index j = 0; j < k; ++j)
      if (features(i, j) > out.medians[j]) ++slow_votes;
    if (rule == ClassifyRule::Majority) {
      out.labels[i] = 2 * slow_votes > k ? SpeedLabel::LikelySlow : SpeedLabel::LikelyFast;
    } else {
      if (slow_votes == k)
        out.labels[i] = SpeedLabel::LikelySlow;
      else if (slow_votes == 0)
        out.labels[i] = SpeedLabel::LikelyFast;
      else
        out.labels[i] = SpeedLabel::Indeterminate;
    }
  }
  return out;
}

FastSlowReport fast_slow_report(const SpeedLabeling& labeling, ConstVectorRef runtimes) {
  if (runtimes.size() != static_cast<Index>(labeling.labels.size()))
    throw DataError("fast_slow_report: runtime count does not match labels");
  std::vector<double> fast, slow;
  for (Index i = 0; i < runtimes.size(); ++i) {
    if (labeling.labels[i] == SpeedLabel::LikelyFast) fast.push_back(runtimes[i]);
    if (labeling.labels[i] == SpeedLabel::LikelySlow) slow.push_back(runtimes[i]);
  }
  if (fast.empty() || slow.empty())
    throw DataError("fast_slow_report: a speed label has no jobs");

  FastSlowReport report;
  report.n_fast = static_cast<Index>(fast.size());
  report.n_slow = static_cast<Index>(slow.size());
  report.mean_fast = Eigen::Map<const Vector>(fast.data(), report.n_fast).mean();
  report.mean_slow = Eigen::Map<const Vector>(slow.data(), report.n_slow).mean();
  const std::array<std::vector<double>, 2> groups{fast, slow};
  report.kruskal_wallis = kruskal_wallis(groups);
  report.anova = one_way_anova(groups);
  return report;
}

}  // namespace dfpred
