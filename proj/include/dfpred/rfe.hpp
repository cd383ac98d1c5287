#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dfpred/gbr.hpp"
#include "dfpred/types.hpp"

namespace dfpred {

struct ImportanceRanking {
  /// Features in elimination order; front() was dropped first, back() last.
  std::vector<std::string> elimination_order;
  /// The five features eliminated last, strongest first.
  std::vector<std::string> top5;
  /// Relevance scores for top5, nonnegative, summing to 1.
  Vector top5_scores;
};

/// 5-fold-averaged GBR feature importances on the given feature set.
/// Importance vectors are normalized per fold model before averaging.
Vector folded_importances(const Matrix& X, const Vector& y, const GbrConfig& cfg, int folds,
                          std::uint64_t seed);

/// Recursive feature elimination: repeatedly drops the feature with the
/// lowest folds-averaged GBR importance (ties broken by dropping the
/// later-alphabet name) until none remain. The top-5 are the last five
/// eliminated; their relevance scores are the folds-averaged importances of
/// a final model trained on exactly that set, renormalized to sum 1.
/// Requires >= 6 features.
ImportanceRanking rfe(const Matrix& X, const Vector& y, std::span<const std::string> names,
                      const GbrConfig& cfg, int folds = 5, std::uint64_t seed = 0);

}  // namespace dfpred
