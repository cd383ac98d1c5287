#include <doctest.h>

#include <cmath>
#include <random>

#include "dfpred/classify.hpp"
#include "dfpred/errors.hpp"

using namespace dfpred;

namespace {

const std::vector<std::string> kNames = {"NUM_GROUPS", "RT_STL_COL", "RT_STL_GBL"};

}

TEST_CASE("unanimous votes label fast and slow") {
  Matrix f(4, 3);
  f << 1, 10, 100,   // all below the medians
      2, 20, 200,
      3, 30, 300,
      4, 40, 400;  // all above
  SpeedLabeling labeling = classify_fast_slow(f, kNames, ClassifyRule::Majority);
  CHECK(labeling.labels.front() == SpeedLabel::LikelyFast);
  CHECK(labeling.labels.back() == SpeedLabel::LikelySlow);
  CHECK(labeling.medians.size() == 3);
  CHECK(labeling.medians[0] == doctest::Approx(2.5));
}

TEST_CASE("majority vote: one above, two below is likely fast") {
  Matrix f(5, 3);
  f << 9, 1, 1,   // votes (above, below, below) -> fast
      0, 0, 0,
      1, 1, 1,
      2, 2, 2,
      3, 9, 9;
  SpeedLabeling labeling = classify_fast_slow(f, kNames, ClassifyRule::Majority);
  CHECK(labeling.labels[0] == SpeedLabel::LikelyFast);
  // Majority labels every job one way or the other.
  for (SpeedLabel l : labeling.labels) CHECK(l != SpeedLabel::Indeterminate);
}

TEST_CASE("values exactly at the median count as below") {
  Matrix f(3, 1);
  f << 1, 2, 3;  // median 2
  std::vector<std::string> one = {"RT_STL_GBL"};
  SpeedLabeling labeling = classify_fast_slow(f, one, ClassifyRule::Majority);
  CHECK(labeling.labels[0] == SpeedLabel::LikelyFast);
  CHECK(labeling.labels[1] == SpeedLabel::LikelyFast);  // at the median
  CHECK(labeling.labels[2] == SpeedLabel::LikelySlow);
}

TEST_CASE("all_three rule labels only unanimous jobs") {
  Matrix f(4, 3);
  f << 0, 0, 0,
      9, 0, 0,   // mixed -> indeterminate
      0, 9, 9,   // mixed -> indeterminate
      9, 9, 9;
  SpeedLabeling labeling = classify_fast_slow(f, kNames, ClassifyRule::AllThree);
  CHECK(labeling.labels[0] == SpeedLabel::LikelyFast);
  CHECK(labeling.labels[1] == SpeedLabel::Indeterminate);
  CHECK(labeling.labels[2] == SpeedLabel::Indeterminate);
  CHECK(labeling.labels[3] == SpeedLabel::LikelySlow);
}

TEST_CASE("labels are invariant under per-feature strictly monotone transforms") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> value(0.1, 10.0);
  Matrix f(40, 3);
  for (Index i = 0; i < f.size(); ++i) f.data()[i] = value(rng);
  SpeedLabeling base = classify_fast_slow(f, kNames, ClassifyRule::Majority);

  Matrix g = f;
  g.col(0) = g.col(0).array().exp();
  g.col(1) = g.col(1).array().cube();
  g.col(2) = 5.0 * g.col(2).array() + 11.0;
  SpeedLabeling transformed = classify_fast_slow(g, kNames, ClassifyRule::Majority);
  CHECK(base.labels == transformed.labels);
}

TEST_CASE("classify input validation") {
  Matrix f(1, 3);
  f.setZero();
  CHECK_THROWS_AS(classify_fast_slow(f, kNames, ClassifyRule::Majority), DataError);
  Matrix f2(4, 2);
  f2.setZero();
  CHECK_THROWS_AS(classify_fast_slow(f2, kNames, ClassifyRule::Majority), DataError);
  std::vector<std::string> none;
  CHECK_THROWS_AS(classify_fast_slow(f2, none, ClassifyRule::Majority), UsageError);
  CHECK_THROWS_AS(rule_from_string("plurality"), UsageError);
}

TEST_CASE("fast_slow_report separates shifted runtime distributions") {
  // Slow jobs drawn from a +20% shifted distribution.
  std::mt19937_64 rng(17);
  std::normal_distribution<double> fast(300, 6);
  const Index n = 120;
  SpeedLabeling labeling;
  labeling.feature_names = kNames;
  labeling.medians = Vector::Zero(3);
  Vector runtimes(n);
  for (Index i = 0; i < n; ++i) {
    const bool slow = i % 2 == 0;
    labeling.labels.push_back(slow ? SpeedLabel::LikelySlow : SpeedLabel::LikelyFast);
    runtimes[i] = fast(rng) * (slow ? 1.2 : 1.0);
  }
  FastSlowReport report = fast_slow_report(labeling, runtimes);
  CHECK(report.n_fast == 60);
  CHECK(report.n_slow == 60);
  CHECK(report.mean_slow > report.mean_fast);
  CHECK(report.kruskal_wallis.p_value < 0.01);
  CHECK(report.anova.p_value < 0.01);
}

TEST_CASE("fast_slow_report rejects single-label inputs") {
  SpeedLabeling labeling;
  labeling.labels = {SpeedLabel::LikelyFast, SpeedLabel::LikelyFast};
  Vector runtimes(2);
  runtimes << 1, 2;
  CHECK_THROWS_AS(fast_slow_report(labeling, runtimes), DataError);
}
